//! The counterexample symbol: `n` copies of the bump `b^_r` centred at
//! `(2 - r) e^{i theta_j}`, and the matching test function `f = phi`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{GaussLegendre, RadialProfile, SpatialBump};
use crate::geometry::{admissible_radius, direction};
use crate::par;
use crate::point::Point;

/// Complex value of the spatial test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// `(n, r, centres, profile)`; determines `phi^ = sum_j b^_r(. - c_j)` and `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub n: usize,
    pub r: f64,
    pub centers: Vec<Point>,
    pub profile: RadialProfile,
}

impl SymbolSpec {
    /// Symbol with the admissible radius `min(1 - 1/sqrt 2, (2/n)^2)`.
    pub fn build(n: usize) -> Result<Self> {
        Self::with_radius(n, admissible_radius(n)?)
    }

    /// Symbol with an arbitrary radius in `(0, 1)`. `n = 1` is accepted here
    /// for scaling checks; it is not part of the construction proper.
    pub fn with_radius(n: usize, r: f64) -> Result<Self> {
        Self::with_profile(n, r, RadialProfile::default())
    }

    pub fn with_profile(n: usize, r: f64, profile: RadialProfile) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one bump".into()));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("bump radius must lie in (0, 1), got {r}")));
        }
        let centers = (1..=n).map(|j| Point::polar(2.0 - r, direction(n, j))).collect();
        Ok(Self { n, r, centers, profile })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("symbol spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad symbol JSON: {e}")))
    }

    /// Direction of bump `j` (1-based).
    pub fn theta(&self, j: usize) -> f64 {
        direction(self.n, j)
    }

    /// Value of the `j`-th bump (1-based) at `xi`.
    #[inline]
    pub fn component_value(&self, j: usize, xi: Point) -> f64 {
        let c = self.centers[j - 1];
        let d2 = (xi - c).norm_sq();
        if d2 >= self.r * self.r {
            return 0.0;
        }
        self.profile.value(d2.sqrt() / self.r)
    }

    /// `phi^(xi) = sum_j psi(|xi - c_j| / r)`.
    #[inline]
    pub fn phi_hat(&self, xi: Point) -> f64 {
        // Every support lies in the annulus 2 - 2r <= |xi| <= 2.
        let m2 = xi.norm_sq();
        let inner = 2.0 - 2.0 * self.r;
        if m2 < inner * inner || m2 > 4.0 {
            return 0.0;
        }
        (1..=self.n).map(|j| self.component_value(j, xi)).sum()
    }

    /// `b_r(x) = r^2 b(r |x|)`.
    pub fn b_r(&self, bump: &SpatialBump, x: Point) -> f64 {
        self.r * self.r * bump.value(self.r * x.norm())
    }

    /// `sum_j e^{2 pi i c_j . x}`.
    pub fn phase_sum(&self, x: Point) -> Complex {
        if self.n.is_multiple_of(2) {
            // c_{j + n/2} = -c_j, so the sum is real.
            let re = self.centers[..self.n / 2]
                .iter()
                .map(|c| (TAU * c.dot(x)).cos())
                .sum::<f64>();
            return Complex { re: 2.0 * re, im: 0.0 };
        }
        let (mut re, mut im) = (0.0, 0.0);
        for c in &self.centers {
            let (s, co) = (TAU * c.dot(x)).sin_cos();
            re += co;
            im += s;
        }
        Complex { re, im }
    }

    /// `f(x) = b_r(x) sum_j e^{2 pi i c_j . x}`; `f^ = phi^`.
    pub fn f_spatial(&self, bump: &SpatialBump, x: Point) -> Complex {
        let b = self.b_r(bump, x);
        let s = self.phase_sum(x);
        Complex {
            re: b * s.re,
            im: b * s.im,
        }
    }

    /// `||b^_r||_1` and `||b^_r||_2^2`.
    pub fn bump_norms(&self) -> Result<BumpNorms> {
        bhat_norms(&self.profile, self.r)
    }
}

/// `f(x)` for the symbol described by `spec`, using the process-wide bump instance.
pub fn f_spatial_eval(spec: &SymbolSpec, x: Point) -> Complex {
    spec.f_spatial(&SpatialBump::shared(&spec.profile), x)
}

/// `phi^(xi)`.
pub fn phi_hat_eval(spec: &SymbolSpec, xi: Point) -> f64 {
    spec.phi_hat(xi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpNorms {
    pub l1: f64,
    pub l2_sq: f64,
}

/// `||b^_r||_1 = 2 pi r^2 \int_0^1 psi(t) t dt`, `||b^_r||_2^2 = 2 pi r^2 \int_0^1 psi(t)^2 t dt`.
pub fn bhat_norms(profile: &RadialProfile, r: f64) -> Result<BumpNorms> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::Domain(format!("bump scale must lie in (0, 1/2), got {r}")));
    }
    let (l1, l2) = normalized_moments(profile);
    Ok(BumpNorms {
        l1: TAU * r * r * l1,
        l2_sq: TAU * r * r * l2,
    })
}

/// `(\int_0^1 psi t dt, \int_0^1 psi^2 t dt)`.
fn normalized_moments(profile: &RadialProfile) -> (f64, f64) {
    let (a, b) = (profile.transition_lower, profile.transition_upper);
    let rule = GaussLegendre::sixteen();
    let plateau = 0.5 * a * a;
    let m1 = rule.integrate_panels(a, b, 32, |t| profile.value(t) * t);
    let m2 = rule.integrate_panels(a, b, 32, |t| profile.value(t).powi(2) * t);
    (plateau + m1, plateau + m2)
}

/// Estimate of `||f||_1`, biased upward by the tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1Estimate {
    /// Quadrature over `|x| <= r_max` plus the tail bound.
    pub value: f64,
    /// The tail bound `n \int_{|y| > r r_max} |b(y)| dy` included in `value`.
    pub error_estimate: f64,
    pub r_max: f64,
    pub nodes: usize,
}

/// Options for [`f_l1_norm_with`].
#[derive(Clone, Copy, Debug)]
pub struct L1Options {
    /// Maximum number of angular nodes across all shells.
    pub node_budget: usize,
    /// Angular points per oscillation period of the phase sum.
    pub points_per_period: f64,
}

impl Default for L1Options {
    fn default() -> Self {
        Self {
            node_budget: 1_000_000_000,
            points_per_period: 8.0,
        }
    }
}

/// `||f||_1` with the default options.
pub fn f_l1_norm(spec: &SymbolSpec, tol: f64) -> Result<L1Estimate> {
    f_l1_norm_with(spec, tol, L1Options::default())
}

/// `||f||_1` by polar shells over `|x| <= R`, doubling `R` from `4/r` until
/// the tail bound is at most `tol` times the accumulated value.
pub fn f_l1_norm_with(spec: &SymbolSpec, tol: f64, opts: L1Options) -> Result<L1Estimate> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(spec.r < 0.5) {
        return Err(Error::Domain(format!(
            "bump scale must lie in (0, 1/2), got {}",
            spec.r
        )));
    }
    let bump = SpatialBump::shared(&spec.profile);
    let shells = ShellRule::new(spec, opts.points_per_period);
    let mut r_max = 4.0 / spec.r;
    let mut done = 0usize;
    let mut value = 0.0;
    let mut nodes = 0usize;
    loop {
        let upto = (r_max / shells.ds).ceil() as usize;
        let added: usize = (done..upto).map(|k| shells.angular_nodes(shells.radius(k))).sum();
        if nodes + added > opts.node_budget {
            return Err(Error::Resource {
                what: format!("||f||_1 quadrature for n = {} out to |x| = {r_max}", spec.n),
                required: nodes + added,
                available: opts.node_budget,
                partial: Some(value),
            });
        }
        value += shells.integrate(spec, &bump, done, upto, |b, s| b.abs() * s);
        nodes += added;
        done = upto;
        let covered = done as f64 * shells.ds;
        let tail = bump.tail_mass(spec.r * covered);
        let bound = spec.n as f64 * (tail.value + tail.truncation_error);
        if bound <= tol * value {
            return Ok(L1Estimate {
                value: value + bound,
                error_estimate: bound,
                r_max: covered,
                nodes,
            });
        }
        r_max *= 2.0;
    }
}

/// `\int_{|x| <= r_max} g(|b_r(x)|, |S(x)|) dx`, `S = sum_j e^{2 pi i c_j . x}`,
/// with the same shell rule as the `L^1` estimate.
pub fn shell_integral<G>(spec: &SymbolSpec, r_max: f64, g: G) -> f64
where
    G: Fn(f64, f64) -> f64 + Sync + Send,
{
    let bump = SpatialBump::shared(&spec.profile);
    let shells = ShellRule::new(spec, 8.0);
    let upto = (r_max / shells.ds).ceil() as usize;
    shells.integrate(spec, &bump, 0, upto, g)
}

/// Midpoint shells in radius; midpoint rule in angle on `[0, pi/n]`, which
/// the n-fold rotation and the reflection `alpha -> -alpha` map onto the
/// whole circle.
struct ShellRule {
    ds: f64,
    half_sector: f64,
    /// Phase-rate factor `(2 - r)`.
    speed: f64,
    points_per_period: f64,
}

impl ShellRule {
    fn new(spec: &SymbolSpec, points_per_period: f64) -> Self {
        let speed = 2.0 - spec.r;
        Self {
            ds: 0.02f64.min(1.0 / (8.0 * speed)),
            half_sector: PI / spec.n as f64,
            speed,
            points_per_period,
        }
    }

    fn radius(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.ds
    }

    /// The phase `2 pi c_j . x` turns at most `2 pi (2 - r) s` per radian, so
    /// one period spans `1 / ((2 - r) s)` radians.
    fn angular_nodes(&self, s: f64) -> usize {
        let m = (self.points_per_period * self.speed * s * self.half_sector).ceil();
        (m as usize).max(16)
    }

    fn integrate<G>(&self, spec: &SymbolSpec, bump: &SpatialBump, from: usize, to: usize, g: G) -> f64
    where
        G: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let full = 2.0 * spec.n as f64;
        let shells = par::map_range(to.saturating_sub(from), |i| {
            let s = self.radius(from + i);
            let b = spec.r * spec.r * bump.value(spec.r * s);
            let m = self.angular_nodes(s);
            let da = self.half_sector / m as f64;
            let ring: f64 = (0..m)
                .map(|k| {
                    let x = Point::polar(s, da * (k as f64 + 0.5));
                    g(b, spec.phase_sum(x).abs())
                })
                .sum();
            full * ring * da * s * self.ds
        });
        shells.into_iter().sum()
    }
}
