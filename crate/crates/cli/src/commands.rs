use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nehari_core::bounds::{self, ScalingConfig, ScalingOutcome, SweepRow, TailBound};
use nehari_core::fourier::RadialProfile;
use nehari_core::geometry::{admissible_radius, certify_disjoint_with_radius};
use nehari_core::hankel::{
    apply, build_kernel, grid_l2_norm, hs_norm_direct, hs_norm_lens, lens_weight_ratio_bounds, operator_norm,
    peng_integral, random_smooth_samples, KernelMetadata, KernelOptions, FULL_GRID_MAX_N,
};
use nehari_core::symbols::{bhat_norms, SymbolSpec};
use nehari_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{Cli, Command, Common, GeometryArgs, HsArgs, KernelArgs, NormArgs, ScalingArgs};
use crate::plot::log_log_svg;
use crate::CliError;

type Out<'a> = &'a mut dyn Write;

/// Slack allowed on `sigma_max <= pi r^2`.
const UPPER_SLACK: f64 = 0.05;
/// Random inputs for the `||M f|| <= sigma ||f||` check.
const APPLY_TRIALS: usize = 10;

pub(crate) fn dispatch(cli: &Cli, out: Out) -> Result<(), CliError> {
    match &cli.command {
        Command::Geometry(a) => geometry(a, &cli.common, out),
        Command::Norm(a) => norm(a, &cli.common, out),
        Command::Scaling(a) => scaling(a, &cli.common, out),
        Command::Hs(a) => hs(a, &cli.common, out),
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_tol(name: &str, tol: f64) -> Result<(), CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("{name} must be positive, got {tol}")));
    }
    Ok(())
}

fn kernel_options(spec: &SymbolSpec, divisor: f64, k: &KernelArgs) -> KernelOptions {
    let mut opts = KernelOptions::localized(spec, divisor);
    opts.max_nodes = k.max_nodes;
    opts
}

#[derive(Serialize)]
struct GeometryRow {
    n: usize,
    r: f64,
    half_width: Option<f64>,
    min_gap: Option<f64>,
    disjoint: bool,
    bound_half_width: Option<f64>,
    bound_disjoint: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn geometry(a: &GeometryArgs, common: &Common, out: Out) -> Result<(), CliError> {
    if let Some(f) = a.radius_factor {
        if !(f > 0.0 && f.is_finite()) {
            return Err(CliError::Usage(format!("radius factor must be positive, got {f}")));
        }
    }
    writeln!(
        out,
        "{:>4} {:>14} {:>12} {:>12} {:>12}  status",
        "n", "r", "half_width", "gap", "two_step"
    )?;
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for &n in &a.n_list.0 {
        let r = match a.radius_factor {
            Some(f) => f * (2.0 / n as f64).powi(2),
            None => admissible_radius(n)?,
        };
        let row = match certify_disjoint_with_radius(n, r) {
            Ok(c) => GeometryRow {
                n,
                r,
                half_width: Some(c.half_width),
                min_gap: Some(c.min_gap),
                disjoint: c.disjoint,
                bound_half_width: Some(c.bound_half_width),
                bound_disjoint: c.bound_disjoint,
                error: None,
            },
            Err(e) => GeometryRow {
                n,
                r,
                half_width: None,
                min_gap: None,
                disjoint: false,
                bound_half_width: None,
                bound_disjoint: false,
                error: Some(e.to_string()),
            },
        };
        let status = match (&row.error, row.disjoint) {
            (Some(e), _) => e.clone(),
            (None, true) => "certified".into(),
            (None, false) => "OVERLAP".into(),
        };
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
        writeln!(
            out,
            "{:>4} {:>14.8e} {:>12} {:>12} {:>12}  {status}",
            n,
            r,
            opt(row.half_width),
            opt(row.min_gap),
            opt(row.bound_half_width)
        )?;
        if !row.disjoint {
            failed.push(n);
        }
        rows.push(row);
    }
    write_json(&common.out_dir, "geometry.json", &rows)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Certification(failed))
    }
}

#[derive(Serialize)]
struct LadderEntry {
    h: f64,
    dim: usize,
    sigma_max: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct NormReport {
    n: usize,
    r: f64,
    h: f64,
    tol: f64,
    sigma_max: f64,
    iterations: usize,
    pi_r2: f64,
    bhat_l1: f64,
    within_upper_bound: bool,
    /// Largest `||M f|| / (sigma_max ||f||)` over seeded random `f`.
    apply_ratio_max: f64,
    seed: u64,
    ladder: Vec<LadderEntry>,
    kernel: KernelMetadata,
}

fn norm(a: &NormArgs, common: &Common, out: Out) -> Result<(), CliError> {
    check_n(a.n)?;
    check_tol("tol", a.kernel.tol)?;
    let spec = SymbolSpec::build(a.n)?;
    let h = a.kernel.h.standard_h(spec.r)?;
    let divisor = a.kernel.h.divisor(spec.r);

    let mut ladder = Vec::new();
    let mut metadata = None;
    let mut apply_ratio_max = 0.0f64;
    for (step, d) in [divisor / 2.0, divisor, divisor * 2.0].into_iter().enumerate() {
        let kernel = build_kernel(&spec, Some(1), &kernel_options(&spec, d, &a.kernel))?;
        let est = operator_norm(&kernel, a.kernel.tol)?;
        if step == 1 {
            if let Some(path) = &a.dump_kernel {
                kernel.write_binary(BufWriter::new(fs::File::create(path)?))?;
            }
            metadata = Some(kernel.metadata());
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            for _ in 0..APPLY_TRIALS {
                let f = random_smooth_samples(&kernel.grid, &mut rng);
                let g = apply(&kernel, &f)?;
                let ratio = grid_l2_norm(&kernel.grid, &g) / (est.sigma_max * grid_l2_norm(&kernel.grid, &f));
                apply_ratio_max = apply_ratio_max.max(ratio);
            }
        }
        ladder.push(LadderEntry {
            h: spec.r / d,
            dim: kernel.dim(),
            sigma_max: est.sigma_max,
            iterations: est.iterations,
        });
    }
    let sigma = ladder[1].sigma_max;
    let pi_r2 = PI * spec.r * spec.r;
    let bhat_l1 = bhat_norms(&spec.profile, spec.r)?.l1;
    let within = sigma <= pi_r2 * (1.0 + UPPER_SLACK);

    writeln!(out, "n = {}, r = {}, h = {h}", spec.n, spec.r)?;
    writeln!(out, "sigma_max       {sigma:.12e}")?;
    writeln!(out, "||b^_r||_1      {bhat_l1:.12e}")?;
    writeln!(out, "pi r^2          {pi_r2:.12e}")?;
    writeln!(out, "sigma / pi r^2  {:.6}", sigma / pi_r2)?;
    writeln!(
        out,
        "max ||Mf|| / sigma ||f|| over {APPLY_TRIALS} draws  {apply_ratio_max:.9}"
    )?;
    writeln!(out, "refinement ladder:")?;
    writeln!(out, "{:>14} {:>7} {:>20} {:>6}", "h", "dim", "sigma_max", "iters")?;
    for e in &ladder {
        writeln!(
            out,
            "{:>14.6e} {:>7} {:>20.12e} {:>6}",
            e.h, e.dim, e.sigma_max, e.iterations
        )?;
    }
    let report = NormReport {
        n: spec.n,
        r: spec.r,
        h,
        tol: a.kernel.tol,
        sigma_max: sigma,
        iterations: ladder[1].iterations,
        pi_r2,
        bhat_l1,
        within_upper_bound: within,
        apply_ratio_max,
        seed: common.seed,
        ladder,
        kernel: metadata.expect("middle rung always built"),
    };
    write_json(&common.out_dir, &format!("norm_n{}.json", spec.n), &report)?;
    if !within {
        return Err(CliError::Check(format!(
            "sigma_max = {sigma} exceeds pi r^2 (1 + {UPPER_SLACK}) = {}",
            pi_r2 * (1.0 + UPPER_SLACK)
        )));
    }
    if apply_ratio_max > 1.0 + 10.0 * a.kernel.tol.max(1e-12) {
        return Err(CliError::Check(format!(
            "a random input reached {apply_ratio_max} times sigma_max"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalingProvenance {
    profile: RadialProfile,
    h: String,
    tol: f64,
    l1_tol: f64,
    kappa: f64,
    a_kappa: f64,
    tail: TailBound,
}

#[derive(Serialize)]
struct ScalingSummary<'a> {
    rows: &'a [SweepRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    provenance: ScalingProvenance,
}

fn scaling(a: &ScalingArgs, common: &Common, out: Out) -> Result<(), CliError> {
    check_tol("tol", a.kernel.tol)?;
    check_tol("l1 tol", a.l1_tol)?;
    if !(a.kappa >= 1.0 && a.kappa.is_finite()) {
        return Err(CliError::Usage(format!("kappa must be >= 1, got {}", a.kappa)));
    }
    let mut n_list = a.n_list.0.clone();
    if a.extended && n_list.last().is_some_and(|&n| n < 32) {
        n_list.push(32);
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(format!(
            "n list must be strictly ascending, got {n_list:?}"
        )));
    }
    // fail fast on spacing before any kernel work
    for &n in &n_list {
        a.kernel.h.standard_h(admissible_radius(n)?)?;
    }
    let cfg = ScalingConfig {
        spacing: a.kernel.h,
        norm_tol: a.kernel.tol,
        l1_tol: a.l1_tol,
        kappa: a.kappa,
        max_kernel_nodes: a.kernel.max_nodes,
        l1_node_budget: a.l1_budget,
    };
    let outcome = bounds::scaling_experiment(&n_list, &cfg)?;
    print_scaling(&outcome, out)?;

    let dir = &common.out_dir;
    fs::create_dir_all(dir)?;
    let mut csv = Vec::new();
    bounds::write_csv(&outcome.rows, &mut csv)?;
    fs::write(dir.join("scaling.csv"), csv)?;
    let summary = ScalingSummary {
        rows: &outcome.rows,
        slope: outcome.slope,
        provenance: ScalingProvenance {
            profile: outcome.profile,
            h: a.kernel.h.to_string(),
            tol: cfg.norm_tol,
            l1_tol: cfg.l1_tol,
            kappa: cfg.kappa,
            a_kappa: outcome.tail.a_kappa,
            tail: outcome.tail.clone(),
        },
    };
    write_json(dir, "scaling.json", &summary)?;
    let points: Vec<(f64, f64)> = outcome.reports().map(|r| (r.n as f64, r.ratio)).collect();
    let note = match outcome.slope {
        Some(s) => format!("fitted slope = {s:.4}"),
        None => "fitted slope absent".to_string(),
    };
    let svg = log_log_svg(&points, "duality lower bound / operator norm", "n", "ratio", &note);
    fs::write(dir.join("scaling.svg"), svg)?;

    match outcome.failures() {
        0 => Ok(()),
        failed => Err(CliError::Partial {
            failed,
            total: outcome.rows.len(),
        }),
    }
}

fn print_scaling(outcome: &ScalingOutcome, out: Out) -> Result<(), CliError> {
    writeln!(
        out,
        "{:>4} {:>10} {:>12} {:>12} {:>10} {:>12} {:>12} {:>8}",
        "n", "r", "sigma_max", "pi r^2", "||f||_1", "lower", "paper_lower", "ratio"
    )?;
    for row in &outcome.rows {
        match row {
            SweepRow::Done(b) => writeln!(
                out,
                "{:>4} {:>10.6} {:>12.6e} {:>12.6e} {:>10.5} {:>12.6e} {:>12.6e} {:>8.4}",
                b.n, b.r, b.upper_computed, b.upper_paper, b.f_l1, b.lower_duality, b.paper_lower, b.ratio
            )?,
            SweepRow::Failed { n, r, error } => writeln!(out, "{n:>4} {r:>10.6}  failed: {error}")?,
        }
    }
    match outcome.slope {
        Some(s) => writeln!(out, "slope of log ratio vs log n: {s:.4}")?,
        None => writeln!(out, "slope: absent (fewer than two points)")?,
    }
    writeln!(out, "A_{} = {:.6}", outcome.tail.kappa, outcome.tail.a_kappa)?;
    Ok(())
}

#[derive(Serialize)]
struct HsReport {
    n: usize,
    r: f64,
    h: f64,
    /// `full` when the whole-symbol kernel fit the budget, else `components`.
    direct_layout: &'static str,
    hs_direct: f64,
    hs_lens: f64,
    direct_over_lens: f64,
    peng: f64,
    peng_per_component: f64,
    peng_over_lens_sq: f64,
    lens_weight_ratio: (f64, f64),
}

fn hs(a: &HsArgs, common: &Common, out: Out) -> Result<(), CliError> {
    check_n(a.n)?;
    let spec = SymbolSpec::build(a.n)?;
    let h = a.kernel.h.standard_h(spec.r)?;
    let divisor = a.kernel.h.divisor(spec.r);

    let full = if spec.n <= FULL_GRID_MAX_N {
        let mut opts = KernelOptions::full(&spec, divisor);
        opts.max_nodes = a.kernel.max_nodes;
        match build_kernel(&spec, None, &opts) {
            Ok(k) => Some(hs_norm_direct(&k)),
            Err(Error::Resource { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let (direct_layout, hs_direct) = match full {
        Some(v) => ("full", v),
        None => {
            let k = build_kernel(&spec, Some(1), &kernel_options(&spec, divisor, &a.kernel))?;
            ("components", hs_norm_direct(&k) * (spec.n as f64).sqrt())
        }
    };
    let hs_lens = hs_norm_lens(&spec);
    let peng = peng_integral(&spec);
    let report = HsReport {
        n: spec.n,
        r: spec.r,
        h,
        direct_layout,
        hs_direct,
        hs_lens,
        direct_over_lens: hs_direct / hs_lens,
        peng,
        peng_per_component: peng / spec.n as f64,
        peng_over_lens_sq: peng / (hs_lens * hs_lens),
        lens_weight_ratio: lens_weight_ratio_bounds(spec.r, 1000),
    };
    writeln!(out, "n = {}, r = {}, h = {h}", spec.n, spec.r)?;
    writeln!(out, "hs_direct ({direct_layout})  {:.10e}", report.hs_direct)?;
    writeln!(out, "hs_lens              {:.10e}", report.hs_lens)?;
    writeln!(out, "direct / lens        {:.6}", report.direct_over_lens)?;
    writeln!(out, "peng                 {:.10e}", report.peng)?;
    writeln!(out, "peng / n             {:.10e}", report.peng_per_component)?;
    writeln!(out, "peng / hs_lens^2     {:.6}", report.peng_over_lens_sq)?;
    writeln!(
        out,
        "lens / (2-d)^1.5     [{:.6}, {:.6}]",
        report.lens_weight_ratio.0, report.lens_weight_ratio.1
    )?;
    write_json(&common.out_dir, &format!("hs_n{}.json", spec.n), &report)?;
    Ok(())
}
