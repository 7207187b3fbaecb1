mod common;

use std::f64::consts::{PI, SQRT_2, TAU};

use nehari_core::geometry::{
    admissible_radius, angular_distance, certified_half_width, certify_disjoint, certify_disjoint_with_radius,
    circle_intersection_angles, intersection_angles_unchecked, lens_area, normalize_angle, sector_bound_half_width,
    CRITICAL_RADIUS,
};
use nehari_core::{Error, Point};
use proptest::prelude::*;
use rand::Rng;

fn random_w(rng: &mut impl Rng, lo: f64, hi: f64) -> Point {
    Point::polar(rng.gen_range(lo..=hi), rng.gen_range(-PI..PI))
}

/// `theta±` by bisection on `theta -> |w - e^{i theta}| - 1`, starting from
/// the direction of `w` (inside the disc) and its opposite.
fn bisection_angles(w: Point) -> (f64, f64) {
    let g = |t: f64| (w - Point::polar(1.0, t)).norm() - 1.0;
    let a = w.arg();
    (common::bisect(g, a - PI, a), common::bisect(g, a, a + PI))
}

#[test]
fn angles_match_bisection() {
    let mut rng = common::rng(2);
    for _ in 0..1000 {
        let w = random_w(&mut rng, SQRT_2, 2.0);
        let (lo, hi) = circle_intersection_angles(w).unwrap();
        let (blo, bhi) = bisection_angles(w);
        assert!(angular_distance(lo, blo) < 1e-10, "{w:?}");
        assert!(angular_distance(hi, bhi) < 1e-10, "{w:?}");
    }
}

#[test]
fn angles_lie_on_both_circles() {
    let mut rng = common::rng(3);
    for _ in 0..1000 {
        let w = random_w(&mut rng, SQRT_2, 2.0);
        let (lo, hi) = circle_intersection_angles(w).unwrap();
        for t in [lo, hi] {
            assert!(((w - Point::polar(1.0, t)).norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn regime_and_domain_errors() {
    assert!(matches!(
        circle_intersection_angles(Point::new(1.3, 0.0)),
        Err(Error::Regime(_))
    ));
    assert!(matches!(
        circle_intersection_angles(Point::new(2.1, 0.0)),
        Err(Error::Domain(_))
    ));
}

fn sample_lens(rng: &mut impl Rng, w: Point, count: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let xi = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if xi.norm() < 1.0 && (w - xi).norm() < 1.0 {
            out.push(xi);
        }
    }
    out
}

#[test]
fn lens_lies_in_sector() {
    let mut rng = common::rng(5);
    for _ in 0..20 {
        let w = random_w(&mut rng, SQRT_2, 1.98);
        let (lo, hi) = circle_intersection_angles(w).unwrap();
        let center = w.arg();
        let half = 0.5 * angular_distance(lo, hi);
        for xi in sample_lens(&mut rng, w, 10_000) {
            assert!(angular_distance(xi.arg(), center) <= half + 1e-12);
        }
    }
}

#[test]
fn sector_fails_below_sqrt_two() {
    let mut rng = common::rng(6);
    let w = Point::polar(1.0, 0.4);
    let (lo, hi) = intersection_angles_unchecked(w);
    let center = w.arg();
    let half = 0.5 * angular_distance(lo, hi);
    let escaped = sample_lens(&mut rng, w, 10_000)
        .into_iter()
        .filter(|xi| angular_distance(xi.arg(), center) > half)
        .count();
    assert!(escaped > 0);
}

#[test]
fn lens_area_monte_carlo() {
    let mut rng = common::rng(7);
    let samples = 10_000;
    let w = Point::new(1.0, 0.0);
    let hits = (0..samples)
        .filter(|_| {
            let xi = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            xi.norm() < 1.0 && (w - xi).norm() < 1.0
        })
        .count();
    let mc = 4.0 * hits as f64 / samples as f64;
    let exact = lens_area(1.0).unwrap();
    assert!((exact - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0)).abs() < 1e-15);
    // four standard errors
    let p = mc / 4.0;
    assert!((mc - exact).abs() < 16.0 * (p * (1.0 - p) / samples as f64).sqrt());
}

#[test]
fn lens_area_decreasing() {
    let mut prev = lens_area(0.0).unwrap();
    assert!((prev - PI).abs() < 1e-15);
    for i in 1..=400 {
        let a = lens_area(2.0 * i as f64 / 400.0).unwrap();
        assert!(a < prev);
        prev = a;
    }
    assert_eq!(lens_area(2.0).unwrap(), 0.0);
}

#[test]
fn admissible_family_certified() {
    for n in 2..=64 {
        let c = certify_disjoint(n).unwrap();
        assert!(c.disjoint && c.min_gap > 0.0, "n = {n}");
        assert_eq!(c.r, admissible_radius(n).unwrap());
    }
}

#[test]
fn negative_control_overlaps() {
    let n = 64;
    let c = certify_disjoint_with_radius(n, 4.0 * (2.0 / n as f64).powi(2)).unwrap();
    assert!(!c.disjoint && c.min_gap < 0.0);
}

#[test]
fn half_widths_below_three_root_r() {
    for i in 1..=1000 {
        let r = CRITICAL_RADIUS * i as f64 / 1000.0;
        let bound = sector_bound_half_width(r).unwrap();
        let exact = certified_half_width(r).unwrap();
        assert!(exact <= bound && bound <= 3.0 * r.sqrt(), "r = {r}");
    }
}

#[test]
fn exact_half_width_covers_sampled_supports() {
    // the arcs I(w) over the support disc never leave the certified interval
    let mut rng = common::rng(9);
    for r in [0.04, 0.1, 0.25] {
        let hw = certified_half_width(r).unwrap();
        let c = Point::new(2.0 - r, 0.0);
        for _ in 0..2000 {
            let w = c + Point::polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
            if w.norm() > 2.0 {
                continue;
            }
            let (lo, hi) = circle_intersection_angles(w).unwrap();
            assert!(lo.abs() <= hw + 1e-12 && hi.abs() <= hw + 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn rotational_covariance(m in 1.4143f64..2.0, arg in -PI..PI, alpha in -PI..PI) {
        let w = Point::polar(m, arg);
        let (lo, hi) = circle_intersection_angles(w).unwrap();
        let (rlo, rhi) = circle_intersection_angles(w.rotate(alpha)).unwrap();
        prop_assert!(angular_distance(rlo, normalize_angle(lo + alpha)) < 1e-12);
        prop_assert!(angular_distance(rhi, normalize_angle(hi + alpha)) < 1e-12);
    }

    #[test]
    fn normalized_range(t in -100.0f64..100.0) {
        let a = normalize_angle(t);
        prop_assert!(a > -PI && a <= PI);
        prop_assert!(angular_distance(a, t) < 1e-12);
    }
}
