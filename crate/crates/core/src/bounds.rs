//! Upper and lower bounds for the bounded-symbol constant, and the sweep over
//! `n` that shows their ratio growing.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{RadialProfile, SpatialBump};
use crate::geometry::admissible_radius;
use crate::hankel::{self, build_kernel, operator_norm, KernelOptions, Spacing};
use crate::par;
use crate::symbols::{bhat_norms, f_l1_norm_with, L1Estimate, L1Options, SymbolSpec};

/// Radii at which the tail constant is sampled.
pub const TAIL_RADII: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
pub const DEFAULT_KAPPA: f64 = 4.0;

/// Empirical constant in `\int_{|x| > rho} |b| <= A_kappa / rho^{kappa - 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub kappa: f64,
    pub a_kappa: f64,
    /// `(rho, tail mass at rho)`.
    pub samples: Vec<(f64, f64)>,
}

impl TailBound {
    pub fn bound(&self, rho: f64) -> f64 {
        self.a_kappa / rho.powf(self.kappa - 1.0)
    }
}

/// `A_kappa = max_rho tail(rho) rho^{kappa - 1}` over [`TAIL_RADII`].
pub fn estimate_tail_constant(profile: &RadialProfile, kappa: f64) -> Result<TailBound> {
    if !(kappa >= 1.0) {
        return Err(Error::Domain(format!("kappa must be >= 1, got {kappa}")));
    }
    let bump = SpatialBump::shared(profile);
    let samples: Vec<(f64, f64)> = TAIL_RADII.iter().map(|&rho| (rho, bump.tail_mass(rho).value)).collect();
    let a_kappa = samples
        .iter()
        .map(|&(rho, t)| t * rho.powf(kappa - 1.0))
        .fold(0.0, f64::max);
    Ok(TailBound {
        kappa,
        a_kappa,
        samples,
    })
}

/// Lower bound `|<f, phi>| / ||f||_1` for the bounded-symbol infimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityBound {
    /// `n ||b^_r||_2^2`.
    pub inner_product: f64,
    pub f_l1: L1Estimate,
    pub value: f64,
}

pub fn duality_lower_bound(n: usize, tol: f64) -> Result<DualityBound> {
    duality_lower_bound_with(&SymbolSpec::build(n)?, tol, L1Options::default())
}

pub fn duality_lower_bound_with(spec: &SymbolSpec, tol: f64, opts: L1Options) -> Result<DualityBound> {
    let norms = bhat_norms(&spec.profile, spec.r)?;
    let inner_product = spec.n as f64 * norms.l2_sq;
    let f_l1 = f_l1_norm_with(spec, tol, opts)?;
    // `f_l1.value` already carries the tail bound, so this is biased low.
    Ok(DualityBound {
        inner_product,
        f_l1,
        value: inner_product / f_l1.value,
    })
}

/// `pi r^2 n^{1/2 - 1/(2 kappa)} / (4 (pi + A_kappa))` with the admissible `r`.
pub fn paper_lower_bound(n: usize, kappa: f64, tail: &TailBound) -> Result<f64> {
    if !(kappa >= 1.0) {
        return Err(Error::Domain(format!("kappa must be >= 1, got {kappa}")));
    }
    let r = admissible_radius(n)?;
    let exponent = 0.5 - 1.0 / (2.0 * kappa);
    Ok(PI * r * r * (n as f64).powf(exponent) / (4.0 * (PI + tail.a_kappa)))
}

/// One row of the scaling sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub r: f64,
    /// `pi r^2`.
    pub upper_paper: f64,
    /// Spectral norm of one component kernel.
    pub upper_computed: f64,
    /// `n ||b^_r||_2^2`.
    pub inner_product: f64,
    pub f_l1: f64,
    pub f_l1_err: f64,
    pub lower_duality: f64,
    pub paper_lower: f64,
    pub ratio: f64,
}

/// A sweep entry: a finished report or the reason it failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepRow {
    Done(BoundsReport),
    Failed { n: usize, r: f64, error: String },
}

impl SweepRow {
    pub fn n(&self) -> usize {
        match self {
            SweepRow::Done(rep) => rep.n,
            SweepRow::Failed { n, .. } => *n,
        }
    }

    pub fn report(&self) -> Option<&BoundsReport> {
        match self {
            SweepRow::Done(rep) => Some(rep),
            SweepRow::Failed { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    /// Kernel spacing; must not exceed `r / 8`.
    pub spacing: Spacing,
    /// Relative tolerance of the power iteration.
    pub norm_tol: f64,
    /// Tail tolerance of the `||f||_1` estimate.
    pub l1_tol: f64,
    pub kappa: f64,
    pub max_kernel_nodes: usize,
    pub l1_node_budget: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            spacing: Spacing::Relative(8.0),
            norm_tol: hankel::DEFAULT_TOL,
            l1_tol: 1e-3,
            kappa: DEFAULT_KAPPA,
            max_kernel_nodes: hankel::DEFAULT_MAX_NODES,
            l1_node_budget: L1Options::default().node_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingOutcome {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log ratio` against `log n`; absent with fewer
    /// than two distinct successful `n`.
    pub slope: Option<f64>,
    pub tail: TailBound,
    pub config: ScalingConfig,
    pub profile: RadialProfile,
}

impl ScalingOutcome {
    pub fn reports(&self) -> impl Iterator<Item = &BoundsReport> {
        self.rows.iter().filter_map(SweepRow::report)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.report().is_none()).count()
    }
}

/// All bounds for one `n`.
pub fn bounds_report(n: usize, cfg: &ScalingConfig, tail: &TailBound) -> Result<BoundsReport> {
    let spec = SymbolSpec::build(n)?;
    cfg.spacing.standard_h(spec.r)?;
    let mut kopts = KernelOptions::localized(&spec, cfg.spacing.divisor(spec.r));
    kopts.max_nodes = cfg.max_kernel_nodes;
    let kernel = build_kernel(&spec, Some(1), &kopts)?;
    let upper_computed = operator_norm(&kernel, cfg.norm_tol)?.sigma_max;
    drop(kernel);
    let dual = duality_lower_bound_with(
        &spec,
        cfg.l1_tol,
        L1Options {
            node_budget: cfg.l1_node_budget,
            ..L1Options::default()
        },
    )?;
    Ok(BoundsReport {
        n,
        r: spec.r,
        upper_paper: PI * spec.r * spec.r,
        upper_computed,
        inner_product: dual.inner_product,
        f_l1: dual.f_l1.value,
        f_l1_err: dual.f_l1.error_estimate,
        lower_duality: dual.value,
        paper_lower: paper_lower_bound(n, cfg.kappa, tail)?,
        ratio: dual.value / upper_computed,
    })
}

/// Runs [`bounds_report`] for every `n`, recording failures in place.
pub fn scaling_experiment(n_list: &[usize], cfg: &ScalingConfig) -> Result<ScalingOutcome> {
    if n_list.is_empty() {
        return Err(Error::Config("empty n list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] < 2 {
        return Err(Error::Config(format!(
            "n list must be strictly ascending with entries >= 2, got {n_list:?}"
        )));
    }
    let profile = RadialProfile::default();
    let tail = estimate_tail_constant(&profile, cfg.kappa)?;
    let rows = par::map_slice(n_list, |&n| match bounds_report(n, cfg, &tail) {
        Ok(rep) => SweepRow::Done(rep),
        Err(e) => SweepRow::Failed {
            n,
            r: admissible_radius(n).unwrap_or(f64::NAN),
            error: e.to_string(),
        },
    });
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(SweepRow::report)
        .map(|rep| ((rep.n as f64).ln(), rep.ratio.ln()))
        .collect();
    Ok(ScalingOutcome {
        slope: fit_slope(&points),
        rows,
        tail,
        config: *cfg,
        profile,
    })
}

/// Least-squares slope; `None` when the abscissae do not spread.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// CSV column order.
pub const CSV_HEADER: [&str; 11] = [
    "n",
    "r",
    "upper_paper",
    "upper_computed",
    "inner_product",
    "f_l1",
    "f_l1_err",
    "lower_duality",
    "paper_lower",
    "ratio",
    "error",
];

/// Writes the sweep as CSV. Failed rows keep `n` and `r` and carry the
/// diagnostic in the trailing `error` column.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Config(format!("csv write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        let record: Vec<String> = match row {
            SweepRow::Done(b) => [
                b.n as f64,
                b.r,
                b.upper_paper,
                b.upper_computed,
                b.inner_product,
                b.f_l1,
                b.f_l1_err,
                b.lower_duality,
                b.paper_lower,
                b.ratio,
            ]
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 { b.n.to_string() } else { v.to_string() })
            .chain(std::iter::once(String::new()))
            .collect(),
            SweepRow::Failed { n, r, error } => {
                let mut rec = vec![n.to_string(), r.to_string()];
                rec.extend(std::iter::repeat_n(String::new(), 8));
                rec.push(error.clone());
                rec
            }
        };
        w.write_record(&record).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv flush failed: {e}")))?;
    Ok(())
}
