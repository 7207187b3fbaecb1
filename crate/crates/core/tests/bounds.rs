mod common;

use std::f64::consts::{PI, TAU};

use nehari_core::bounds::{
    duality_lower_bound, estimate_tail_constant, fit_slope, paper_lower_bound, scaling_experiment, write_csv,
    ScalingConfig, SweepRow, TAIL_RADII,
};
use nehari_core::fourier::{j0, RadialProfile};
use nehari_core::geometry::admissible_radius;
use nehari_core::hankel::Spacing;
use nehari_core::symbols::bhat_norms;
use proptest::prelude::*;

/// Tail constant for `kappa = 4` and the default profile.
const A4: f64 = 24.514981083790822;
/// Duality lower bound for `n = 4` at `tol = 1e-3`.
const DUALITY_N4: f64 = 0.06907441675946;
/// Closed-form lower bound for `n = 4`, `kappa = 4`.
const PAPER_LOWER_N4: f64 = 0.002984997827366071;

fn profile() -> RadialProfile {
    RadialProfile::default()
}

/// `b(s)` by composite Simpson on the order-zero transform.
fn bump_direct(s: f64) -> f64 {
    let p = profile();
    let m = 8000;
    let h = 1.0 / m as f64;
    let f = |rho: f64| p.value(rho) * j0(TAU * rho * s) * rho;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    TAU * acc * h / 3.0
}

/// `\int_{|x| > rho} |b|` for each `rho`, from one tabulation of `b` on
/// `[1, 48]`: trapezoid on `|b| s` at two spacings, zero crossings located by
/// linear interpolation, then one Richardson step.
fn tails_direct(radii: &[f64]) -> Vec<f64> {
    let step = 2e-3;
    let count = 2 * (23.5 / step) as usize;
    let s: Vec<f64> = (0..=count).map(|i| 1.0 + i as f64 * step).collect();
    let b: Vec<f64> = s.iter().map(|&x| bump_direct(x)).collect();
    let piece = |i: usize, j: usize| {
        let (s0, s1, b0, b1) = (s[i], s[j], b[i], b[j]);
        if b0 * b1 >= 0.0 {
            0.5 * (s1 - s0) * (b0.abs() * s0 + b1.abs() * s1)
        } else {
            let z = s0 + (s1 - s0) * b0 / (b0 - b1);
            0.5 * (z - s0) * b0.abs() * s0 + 0.5 * (s1 - z) * b1.abs() * s1
        }
    };
    radii
        .iter()
        .map(|&rho| {
            let first = ((rho - 1.0) / step).round() as usize;
            let fine: f64 = (first..count).map(|i| piece(i, i + 1)).sum();
            let coarse: f64 = (first..count).step_by(2).map(|i| piece(i, i + 2)).sum();
            TAU * (4.0 * fine - coarse) / 3.0
        })
        .collect()
}

#[test]
fn tail_constant_matches_direct_quadrature() {
    let tail = estimate_tail_constant(&profile(), 4.0).unwrap();
    let direct = tails_direct(&TAIL_RADII);
    for (&(rho, t), want) in tail.samples.iter().zip(&direct) {
        assert!((t - want).abs() < 1e-6 * want.max(1e-3), "rho = {rho}: {t} vs {want}");
    }
    let want = TAIL_RADII
        .iter()
        .zip(&direct)
        .map(|(&rho, &t)| t * rho.powi(3))
        .fold(0.0, f64::max);
    assert!((tail.a_kappa / want - 1.0).abs() < 1e-6, "{} vs {want}", tail.a_kappa);
    assert!((tail.a_kappa / A4 - 1.0).abs() < 1e-10);
}

#[test]
fn tail_samples_respect_the_bound() {
    for kappa in [1.0, 2.0, 4.0, 6.0] {
        let tail = estimate_tail_constant(&profile(), kappa).unwrap();
        assert_eq!(tail.samples.len(), TAIL_RADII.len());
        for &(rho, t) in &tail.samples {
            assert!(t <= tail.bound(rho) * (1.0 + 1e-15), "kappa {kappa}, rho {rho}");
        }
    }
    // tails shrink, so with kappa = 1 the first sample dominates
    let one = estimate_tail_constant(&profile(), 1.0).unwrap();
    assert_eq!(one.a_kappa, one.samples[0].1);
}

#[test]
fn tail_at_sixteen_is_strictly_inside() {
    let tail = estimate_tail_constant(&profile(), 4.0).unwrap();
    let (rho, t) = *tail.samples.last().unwrap();
    assert_eq!(rho, 16.0);
    assert!(t * 16f64.powi(3) < 0.1 * tail.a_kappa);
}

#[test]
fn kappa_below_one_is_rejected() {
    assert!(estimate_tail_constant(&profile(), 0.5).is_err());
    let tail = estimate_tail_constant(&profile(), 4.0).unwrap();
    assert!(paper_lower_bound(4, 0.9, &tail).is_err());
    assert!(paper_lower_bound(1, 4.0, &tail).is_err());
}

#[test]
fn paper_lower_bound_formula() {
    let tail = estimate_tail_constant(&profile(), 4.0).unwrap();
    for n in [4usize, 5, 8, 16, 64] {
        let nf = n as f64;
        let want = PI * (2.0 / nf).powi(4) * nf.powf(0.5 - 0.125) / (4.0 * (PI + tail.a_kappa));
        let got = paper_lower_bound(n, 4.0, &tail).unwrap();
        assert!((got / want - 1.0).abs() < 1e-14, "n = {n}");
    }
    // n = 2, 3 sit on the regime cap
    let r0 = admissible_radius(2).unwrap();
    let want = PI * r0 * r0 * 2f64.powf(0.375) / (4.0 * (PI + tail.a_kappa));
    assert!((paper_lower_bound(2, 4.0, &tail).unwrap() / want - 1.0).abs() < 1e-14);
    let got = paper_lower_bound(4, 4.0, &tail).unwrap();
    assert!((got / PAPER_LOWER_N4 - 1.0).abs() < 1e-10, "{got}");
}

#[test]
fn duality_bound_for_four() {
    let d = duality_lower_bound(4, 1e-3).unwrap();
    let r = admissible_radius(4).unwrap();
    let norms = bhat_norms(&profile(), r).unwrap();
    assert!((d.value / DUALITY_N4 - 1.0).abs() < 1e-9, "{}", d.value);
    assert!(d.inner_product >= PI * 4.0 * r * r / 4.0);
    assert!(d.value <= 4.0 * norms.l1);
    assert_eq!(d.value, d.inner_product / d.f_l1.value);
    assert!(d.f_l1.error_estimate <= 1e-3 * d.f_l1.value);
}

#[test]
fn sandwich_against_closed_form() {
    let tail = estimate_tail_constant(&profile(), 4.0).unwrap();
    for n in [4usize, 8] {
        let d = duality_lower_bound(n, 1e-3).unwrap();
        let p = paper_lower_bound(n, 4.0, &tail).unwrap();
        assert!(p <= d.value * 1.02, "n = {n}: {p} vs {}", d.value);
    }
}

#[test]
fn single_point_sweep_has_no_slope() {
    let out = scaling_experiment(&[4], &ScalingConfig::default()).unwrap();
    assert_eq!(out.slope, None);
    assert_eq!(out.failures(), 0);
    let rep = out.reports().next().unwrap();
    assert_eq!(rep.ratio, rep.lower_duality / rep.upper_computed);
    assert_eq!(rep.upper_paper, PI * rep.r * rep.r);
    assert!(rep.upper_computed <= rep.upper_paper * 1.05);
    assert!(rep.ratio > 0.0);
    let norms = bhat_norms(&out.profile, rep.r).unwrap();
    assert!(rep.lower_duality <= 4.0 * norms.l1);
    assert!((rep.lower_duality / DUALITY_N4 - 1.0).abs() < 1e-9);
}

#[test]
fn failures_are_recorded_in_place() {
    // fine enough for n = 4, too coarse for n = 8
    let cfg = ScalingConfig {
        spacing: Spacing::Absolute(0.03),
        ..ScalingConfig::default()
    };
    let out = scaling_experiment(&[4, 8], &cfg).unwrap();
    assert_eq!(out.rows.len(), 2);
    assert!(matches!(out.rows[0], SweepRow::Done(_)));
    match &out.rows[1] {
        SweepRow::Failed { n, r, error } => {
            assert_eq!(*n, 8);
            assert_eq!(*r, 0.0625);
            assert!(!error.is_empty());
        }
        other => panic!("expected failure, got {other:?}"),
    }
    assert_eq!(out.failures(), 1);
    assert_eq!(out.slope, None);

    let mut buf = Vec::new();
    write_csv(&out.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,r,upper_paper,upper_computed,inner_product,f_l1,f_l1_err,lower_duality,paper_lower,ratio,error"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("8,0.0625,,,,,,,,,"));
}

#[test]
fn malformed_lists_are_rejected() {
    let cfg = ScalingConfig::default();
    assert!(scaling_experiment(&[], &cfg).is_err());
    assert!(scaling_experiment(&[8, 4], &cfg).is_err());
    assert!(scaling_experiment(&[4, 4], &cfg).is_err());
    assert!(scaling_experiment(&[1, 4], &cfg).is_err());
}

proptest! {
    #[test]
    fn slope_of_power_law(p in -2.0f64..2.0, c in 0.1f64..10.0) {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0]
            .iter()
            .map(|&n| (n.ln(), (c * n.powf(p)).ln()))
            .collect();
        prop_assert!((fit_slope(&pts).unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn exponent_approaches_one_half(kappa in 1.0f64..40.0) {
        let tail = estimate_tail_constant(&profile(), kappa).unwrap();
        let lo = paper_lower_bound(4, kappa, &tail).unwrap();
        let hi = paper_lower_bound(16, kappa, &tail).unwrap();
        let exponent = (hi / lo).ln() / 4f64.ln() + 4.0;
        prop_assert!((exponent - (0.5 - 0.5 / kappa)).abs() < 1e-12);
        prop_assert!(exponent < 0.5);
    }
}
