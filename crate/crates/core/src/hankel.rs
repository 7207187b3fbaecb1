//! Discretised Hankel operators `(H f)^(eta) = \int_D f^(xi) phi^(xi + eta) dxi`.
//!
//! A kernel is assembled on one polar grid shared by rows (`eta`) and columns
//! (`xi`) and scaled as `M[i, k] = sqrt(w_i) phi^(xi_k + eta_i) sqrt(w_k)`, so
//! the plain spectral norm of `M` approximates the `L^2(D) -> L^2(D)` norm and
//! its Frobenius norm approximates the Hilbert-Schmidt norm.

use std::f64::consts::TAU;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{disc_quadrature, disc_quadrature_folded, GaussLegendre, PlanarGrid, Region};
use crate::geometry::lens_area_unchecked;
use crate::par;
use crate::point::Point;
use crate::symbols::SymbolSpec;

/// Default cap on power iterations.
pub const MAX_ITERATIONS: usize = 100_000;
/// Default relative tolerance for the norm estimate.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Coarsest admissible spacing, as a fraction of the bump radius.
pub const COARSEST_SPACING: f64 = 0.25;
/// Default node cap (a dense matrix of this size takes ~290 MB).
pub const DEFAULT_MAX_NODES: usize = 6_000;
/// Largest `n` for which a full-disc kernel of the whole symbol is allowed.
pub const FULL_GRID_MAX_N: usize = 8;
/// Standard spacing `h <= r / 8` for reported norms.
pub const STANDARD_SPACING: f64 = 0.125;

/// Grid spacing relative to the bump radius or in absolute units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// `h = r / k`.
    Relative(f64),
    Absolute(f64),
}

impl Spacing {
    pub fn h(self, r: f64) -> f64 {
        match self {
            Spacing::Relative(k) => r / k,
            Spacing::Absolute(h) => h,
        }
    }

    /// `r / h`.
    pub fn divisor(self, r: f64) -> f64 {
        match self {
            Spacing::Relative(k) => k,
            Spacing::Absolute(h) => r / h,
        }
    }

    /// Spacing for radius `r`, rejecting anything coarser than `r / 8`.
    pub fn standard_h(self, r: f64) -> Result<f64> {
        let h = self.h(r);
        let limit = STANDARD_SPACING * r;
        if !(h > 0.0) || h > limit * (1.0 + 1e-12) {
            return Err(Error::Resolution { h, limit, radius: r });
        }
        Ok(h)
    }
}

impl std::str::FromStr for Spacing {
    type Err = String;

    /// Parses `r/<k>` or a plain number.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (value, relative) = match s.strip_prefix("r/") {
            Some(k) => (k, true),
            None => (s, false),
        };
        let v: f64 = value
            .parse()
            .map_err(|_| format!("`{s}` is neither `r/<k>` nor a number"))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(format!("spacing `{s}` must be positive"));
        }
        Ok(if relative {
            Spacing::Relative(v)
        } else {
            Spacing::Absolute(v)
        })
    }
}

impl std::fmt::Display for Spacing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Spacing::Relative(k) => write!(f, "r/{k}"),
            Spacing::Absolute(h) => write!(f, "{h}"),
        }
    }
}

/// Which grid carries a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridLayout {
    /// Only `{ |xi| < 1, |c_j - xi| < 1 + r }`, the rows and columns a single
    /// bump can reach.
    Localized,
    /// The whole unit disc, with angular counts divisible by `n`. A component
    /// kernel keeps the subset of nodes it can reach.
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct KernelOptions {
    pub h: f64,
    pub layout: GridLayout,
    pub max_nodes: usize,
}

impl KernelOptions {
    /// Localized grid with spacing `r / divisor`.
    pub fn localized(spec: &SymbolSpec, divisor: f64) -> Self {
        Self {
            h: spec.r / divisor,
            layout: GridLayout::Localized,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn full(spec: &SymbolSpec, divisor: f64) -> Self {
        Self {
            h: spec.r / divisor,
            layout: GridLayout::Full,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// Where a kernel came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub symbol: Option<SymbolSpec>,
    /// 1-based component index, or `None` for the whole symbol.
    pub component: Option<usize>,
    pub layout: GridLayout,
    pub h: f64,
    pub label: String,
}

/// Weight-symmetrised dense kernel on a shared row/column grid.
#[derive(Clone, Debug)]
pub struct HankelKernel {
    pub grid: PlanarGrid,
    pub provenance: Provenance,
    dim: usize,
    /// Row-major `dim x dim`.
    matrix: Vec<f64>,
}

/// JSON-friendly kernel description (everything but the matrix).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelMetadata {
    pub provenance: Provenance,
    pub dim: usize,
    pub region: Region,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl HankelKernel {
    /// Assembles `sqrt(w_i) symbol(xi_k + eta_i) sqrt(w_k)` on `grid`.
    pub fn assemble<F>(grid: PlanarGrid, provenance: Provenance, symbol: F) -> Self
    where
        F: Fn(Point) -> f64 + Sync + Send,
    {
        let dim = grid.len();
        let sqrt_w: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let mut matrix = vec![0.0; dim * dim];
        {
            let nodes = &grid.nodes;
            let sqrt_w = &sqrt_w;
            par::fill_rows(&mut matrix, dim, |i, row| {
                let eta = nodes[i];
                let wi = sqrt_w[i];
                for (k, slot) in row.iter_mut().enumerate() {
                    let v = symbol(nodes[k] + eta);
                    *slot = if v == 0.0 { 0.0 } else { (wi * sqrt_w[k]) * v };
                }
            });
        }
        Self {
            grid,
            provenance,
            dim,
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, k: usize) -> f64 {
        self.matrix[i * self.dim + k]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.dim;
        par::map_range(dim, |i| {
            self.matrix[i * dim..(i + 1) * dim]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    pub fn metadata(&self) -> KernelMetadata {
        KernelMetadata {
            provenance: self.provenance.clone(),
            dim: self.dim,
            region: self.grid.region,
            nodes: self.grid.nodes.clone(),
            weights: self.grid.weights.clone(),
        }
    }

    /// Little-endian dump: `u64 rows`, `u64 cols`, then `f64` entries row-major.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(&(self.dim as u64).to_le_bytes())?;
        out.write_all(&(self.dim as u64).to_le_bytes())?;
        for v in &self.matrix {
            out.write_all(&v.to_le_bytes())?;
        }
        out.flush()
    }
}

/// Reads a matrix written by [`HankelKernel::write_binary`]: `(rows, cols, data)`.
pub fn read_binary<R: Read>(mut input: R) -> std::io::Result<(usize, usize, Vec<f64>)> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        input.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    Ok((rows, cols, data))
}

/// Grid for a kernel of `spec` (whole symbol or one component).
pub fn kernel_grid(spec: &SymbolSpec, component: Option<usize>, opts: &KernelOptions) -> Result<PlanarGrid> {
    let limit = COARSEST_SPACING * spec.r;
    if !(opts.h > 0.0) || opts.h > limit * (1.0 + 1e-12) {
        return Err(Error::Resolution {
            h: opts.h,
            limit,
            radius: spec.r,
        });
    }
    if let Some(j) = component {
        if j == 0 || j > spec.n {
            return Err(Error::Domain(format!("component {j} out of range 1..={}", spec.n)));
        }
    }
    let reach = 1.0 + spec.r;
    let grid = match (component, opts.layout) {
        (Some(j), GridLayout::Localized) => {
            let region = Region::LensNeighborhood {
                center: spec.centers[j - 1],
                reach,
            };
            check_budget(region.area(), opts)?;
            disc_quadrature(&region, opts.h)?
        }
        (Some(j), GridLayout::Full) => {
            check_budget(std::f64::consts::PI, opts)?;
            let full = disc_quadrature_folded(&Region::UNIT_DISC, opts.h, spec.n)?;
            let c = spec.centers[j - 1];
            full.restrict(Region::LensNeighborhood { center: c, reach }, |p| {
                (p - c).norm() < reach
            })
        }
        (None, GridLayout::Full) => {
            if spec.n > FULL_GRID_MAX_N {
                return Err(Error::Config(format!(
                    "full-disc kernel of the whole symbol is limited to n <= {FULL_GRID_MAX_N}, got {}",
                    spec.n
                )));
            }
            check_budget(std::f64::consts::PI, opts)?;
            disc_quadrature_folded(&Region::UNIT_DISC, opts.h, spec.n)?
        }
        (None, GridLayout::Localized) => return Err(Error::Config("a localized grid needs a component index".into())),
    };
    if grid.len() > opts.max_nodes {
        return Err(Error::Resource {
            what: "kernel grid".into(),
            required: grid.len(),
            available: opts.max_nodes,
            partial: None,
        });
    }
    Ok(grid)
}

/// Rough node count from the area, so oversize grids fail before allocation.
fn check_budget(area: f64, opts: &KernelOptions) -> Result<()> {
    let estimate = (area / (opts.h * opts.h)).ceil() as usize;
    if estimate > 4 * opts.max_nodes {
        return Err(Error::Resource {
            what: "kernel grid".into(),
            required: estimate,
            available: opts.max_nodes,
            partial: None,
        });
    }
    Ok(())
}

/// Kernel of the whole symbol (`component = None`) or of bump `j` (1-based).
pub fn build_kernel(spec: &SymbolSpec, component: Option<usize>, opts: &KernelOptions) -> Result<HankelKernel> {
    let grid = kernel_grid(spec, component, opts)?;
    let provenance = Provenance {
        symbol: Some(spec.clone()),
        component,
        layout: opts.layout,
        h: opts.h,
        label: match component {
            Some(j) => format!("phi_{j}"),
            None => "phi".into(),
        },
    };
    Ok(match component {
        Some(j) => HankelKernel::assemble(grid, provenance, |w| spec.component_value(j, w)),
        None => HankelKernel::assemble(grid, provenance, |w| spec.phi_hat(w)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub sigma_max: f64,
    pub iterations: usize,
}

/// Largest singular value by power iteration from the all-ones vector.
///
/// The estimate `||M v_k||` with `||v_k|| = 1` is non-decreasing and converges
/// to the spectral radius even when `-sigma` is also an eigenvalue.
pub fn operator_norm(kernel: &HankelKernel, tol: f64) -> Result<NormEstimate> {
    operator_norm_capped(kernel, tol, MAX_ITERATIONS)
}

pub fn operator_norm_capped(kernel: &HankelKernel, tol: f64, max_iterations: usize) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let dim = kernel.dim();
    if dim == 0 {
        return Ok(NormEstimate {
            sigma_max: 0.0,
            iterations: 0,
        });
    }
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut last = 0.0;
    for it in 1..=max_iterations {
        let w = kernel.matvec(&v);
        let sigma = norm(&w);
        if sigma == 0.0 {
            return Ok(NormEstimate {
                sigma_max: 0.0,
                iterations: it,
            });
        }
        if it > 1 && (sigma - last).abs() <= tol * sigma {
            return Ok(NormEstimate {
                sigma_max: sigma,
                iterations: it,
            });
        }
        last = sigma;
        v = w.into_iter().map(|x| x / sigma).collect();
    }
    Err(Error::Convergence {
        iterations: max_iterations,
        last,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Discrete image of `f^` (sampled on the column grid) under the operator,
/// sampled on the row grid.
pub fn apply(kernel: &HankelKernel, fhat: &[f64]) -> Result<Vec<f64>> {
    if fhat.len() != kernel.dim() {
        return Err(Error::Contract(format!(
            "vector of length {} applied to a kernel of dimension {}",
            fhat.len(),
            kernel.dim()
        )));
    }
    let sqrt_w: Vec<f64> = kernel.grid.weights.iter().map(|w| w.sqrt()).collect();
    let scaled: Vec<f64> = fhat.iter().zip(&sqrt_w).map(|(f, s)| f * s).collect();
    let out = kernel.matvec(&scaled);
    Ok(out.into_iter().zip(&sqrt_w).map(|(y, s)| y / s).collect())
}

/// Weighted `L^2` norm of samples on a grid.
pub fn grid_l2_norm(grid: &PlanarGrid, samples: &[f64]) -> f64 {
    samples
        .iter()
        .zip(&grid.weights)
        .map(|(v, w)| w * v * v)
        .sum::<f64>()
        .sqrt()
}

/// Random smooth function on the closed unit disc: a seeded combination of
/// low-order Fourier modes.
pub fn random_smooth_samples(grid: &PlanarGrid, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let modes: Vec<(f64, f64, f64)> = (0..8)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            )
        })
        .collect();
    let phase: f64 = rng.gen_range(0.0..TAU);
    grid.nodes
        .iter()
        .map(|p| {
            modes
                .iter()
                .map(|&(a, kx, ky)| a * (kx * p.x + ky * p.y + phase).cos())
                .sum()
        })
        .collect()
}

/// Largest normalised cross inner product `|<H_j f, H_k f>| / (|H_j f| |H_k f|)`
/// over `trials` random smooth `f^`, with both component kernels on the full
/// shared grid. `0/0` counts as 0.
pub fn cross_orthogonality(spec: &SymbolSpec, j: usize, k: usize, trials: usize, h: f64, seed: u64) -> Result<f64> {
    let (kj, kk) = component_pair(spec, j, k, h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = random_smooth_samples(&kj.grid, &mut rng);
        worst = worst.max(cosine(&kj, &kk, &f)?);
    }
    Ok(worst)
}

/// The normalised cross inner product for one given `f^`.
pub fn cross_cosine<F: Fn(Point) -> f64>(spec: &SymbolSpec, j: usize, k: usize, h: f64, fhat: F) -> Result<f64> {
    let (kj, kk) = component_pair(spec, j, k, h)?;
    let f: Vec<f64> = kj.grid.nodes.iter().map(|&p| fhat(p)).collect();
    cosine(&kj, &kk, &f)
}

fn component_pair(spec: &SymbolSpec, j: usize, k: usize, h: f64) -> Result<(HankelKernel, HankelKernel)> {
    if j == k {
        return Err(Error::Domain(
            "cross orthogonality needs two distinct components".into(),
        ));
    }
    for idx in [j, k] {
        if idx == 0 || idx > spec.n {
            return Err(Error::Domain(format!("component {idx} out of range 1..={}", spec.n)));
        }
    }
    // r is arbitrary in negative controls; only the grid spacing must be sane.
    let grid = disc_quadrature_folded(&Region::UNIT_DISC, h, spec.n)?;
    if grid.len() > DEFAULT_MAX_NODES {
        return Err(Error::Resource {
            what: "shared grid".into(),
            required: grid.len(),
            available: DEFAULT_MAX_NODES,
            partial: None,
        });
    }
    let kernel_for = |c: usize| {
        HankelKernel::assemble(
            grid.clone(),
            Provenance {
                symbol: Some(spec.clone()),
                component: Some(c),
                layout: GridLayout::Full,
                h,
                label: format!("phi_{c}"),
            },
            |w| spec.component_value(c, w),
        )
    };
    Ok((kernel_for(j), kernel_for(k)))
}

fn cosine(kj: &HankelKernel, kk: &HankelKernel, f: &[f64]) -> Result<f64> {
    let weighted = |u: Vec<f64>| -> Vec<f64> { u.iter().zip(&kj.grid.weights).map(|(x, w)| x * w.sqrt()).collect() };
    let a = weighted(apply(kj, f)?);
    let b = weighted(apply(kk, f)?);
    let denom = norm(&a) * norm(&b);
    Ok(if denom == 0.0 { 0.0 } else { dot(&a, &b).abs() / denom })
}

/// Discrete Hilbert-Schmidt norm: the Frobenius norm of the scaled kernel.
pub fn hs_norm_direct(kernel: &HankelKernel) -> f64 {
    kernel.matrix.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Polar rule on one support disc `B(c_j, r)`: 16-point Gauss-Legendre
/// panels in radius and a periodic trapezoid in angle aligned with `c_j`.
fn support_disc_integral<F: Fn(Point) -> f64>(spec: &SymbolSpec, j: usize, g: F) -> f64 {
    const RADIAL_PANELS: usize = 12;
    const ANGLES: usize = 512;
    let rule = GaussLegendre::sixteen();
    let c = spec.centers[j - 1];
    let axis = spec.theta(j);
    let dth = TAU / ANGLES as f64;
    let step = spec.r / RADIAL_PANELS as f64;
    let mut total = 0.0;
    for p in 0..RADIAL_PANELS {
        let lo = step * p as f64;
        for (rho, wr) in rule.mapped(lo, lo + step) {
            let ring: f64 = (0..ANGLES)
                .map(|k| g(c + Point::polar(rho, axis + dth * k as f64)))
                .sum();
            total += wr * rho * dth * ring;
        }
    }
    total
}

/// `||H_phi||_{S_2} = ( \int_{2D} |phi^(w)|^2 lens_area(|w|) dw )^{1/2}`, from
/// the substitution `w = xi + eta`.
pub fn hs_norm_lens(spec: &SymbolSpec) -> f64 {
    let sq: f64 = (1..=spec.n)
        .map(|j| {
            support_disc_integral(spec, j, |w| {
                let v = spec.component_value(j, w);
                v * v * lens_area_unchecked(w.norm())
            })
        })
        .sum();
    sq.sqrt()
}

/// `\int_{2D} |phi^(xi)|^2 (2 - |xi|)^{3/2} dxi`.
pub fn peng_integral(spec: &SymbolSpec) -> f64 {
    (1..=spec.n)
        .map(|j| {
            support_disc_integral(spec, j, |w| {
                let v = spec.component_value(j, w);
                v * v * (2.0 - w.norm()).max(0.0).powf(1.5)
            })
        })
        .sum()
}

/// Bounds `[min, max]` of `lens_area(d) / (2 - d)^{3/2}` over the support annulus
/// `2 - 2r <= d < 2`, sampled on `samples` points.
pub fn lens_weight_ratio_bounds(r: f64, samples: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..samples {
        let d = 2.0 - 2.0 * r * (i as f64 + 0.5) / samples as f64;
        let ratio = lens_area_unchecked(d) / (2.0 - d).powf(1.5);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}
