//! Lens geometry of the unit disc and its translates.
//!
//! For `w` with `sqrt 2 <= |w| <= 2`, the lens `D(w) = {|xi| < 1} ∩ {|w - xi| < 1}`
//! lies in the sector spanned by the two circle intersection points
//! `e^{i theta±}`, `theta± = arg w ± arccos(|w|/2)`. The union of these arcs
//! over the support of each bump is an angular interval; pairwise
//! disjointness of the intervals certifies that the Hankel pieces act on
//! disjoint regions.

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// `1 - 1/sqrt 2`: the largest bump radius keeping every support point at
/// modulus `>= sqrt 2`.
pub const CRITICAL_RADIUS: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// Relative slack for the modulus regime checks.
const MODULUS_SLACK: f64 = 1e-12;

/// Reduces an angle to `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Unsigned distance between two angles on the circle, in `[0, pi]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

/// Arc `(center - half_width, center + half_width)` on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularInterval {
    pub center: f64,
    pub half_width: f64,
}

impl AngularInterval {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width >= 0.0) {
            return Err(Error::Domain(format!("half width must be >= 0, got {half_width}")));
        }
        Ok(Self {
            center: normalize_angle(center),
            half_width,
        })
    }

    /// Closed containment, modulo `2 pi`.
    pub fn contains(&self, angle: f64) -> bool {
        self.half_width >= PI || angular_distance(angle, self.center) <= self.half_width
    }

    /// Signed gap between the two arcs on the circle; negative means overlap.
    pub fn gap(&self, other: &AngularInterval) -> f64 {
        angular_distance(self.center, other.center) - self.half_width - other.half_width
    }

    pub fn is_disjoint(&self, other: &AngularInterval) -> bool {
        self.gap(other) > 0.0
    }
}

/// Angles `(theta-, theta+)` at which the unit circle meets the unit circle
/// centred at `w`, both reduced to `(-pi, pi]`.
pub fn circle_intersection_angles(w: Point) -> Result<(f64, f64)> {
    let m = w.norm();
    if m > 2.0 * (1.0 + MODULUS_SLACK) {
        return Err(Error::Domain(format!("|w| = {m} > 2: the circles do not intersect")));
    }
    if m < SQRT_2 * (1.0 - MODULUS_SLACK) {
        return Err(Error::Regime(format!(
            "|w| = {m} < sqrt 2: the lens is not contained in the sector"
        )));
    }
    Ok(intersection_angles_unchecked(w))
}

/// The same closed form without the regime check; defined for `0 < |w| <= 2`.
pub fn intersection_angles_unchecked(w: Point) -> (f64, f64) {
    let spread = (0.5 * w.norm()).min(1.0).acos();
    let arg = w.arg();
    (normalize_angle(arg - spread), normalize_angle(arg + spread))
}

/// Area of the intersection of two unit discs whose centres are `d` apart.
pub fn lens_area(d: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&d) {
        return Err(Error::Domain(format!("centre distance must lie in [0, 2], got {d}")));
    }
    Ok(lens_area_unchecked(d))
}

#[inline]
pub(crate) fn lens_area_unchecked(d: f64) -> f64 {
    let d = d.clamp(0.0, 2.0);
    2.0 * (0.5 * d).acos() - 0.5 * d * (4.0 - d * d).max(0.0).sqrt()
}

/// `min(1 - 1/sqrt 2, (2/n)^2)`.
pub fn admissible_radius(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    let q = 2.0 / n as f64;
    Ok(CRITICAL_RADIUS.min(q * q))
}

/// Direction of the `j`-th bump (1-based): `2 pi (j - 1) / n`.
pub fn direction(n: usize, j: usize) -> f64 {
    normalize_angle(TAU * (j as f64 - 1.0) / n as f64)
}

fn check_regime(r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("bump radius must be positive, got {r}")));
    }
    if r > CRITICAL_RADIUS * (1.0 + MODULUS_SLACK) {
        return Err(Error::Regime(format!(
            "bump radius {r} exceeds 1 - 1/sqrt 2: support points may have |w| < sqrt 2"
        )));
    }
    Ok(())
}

/// Two-step bound `arccos(1 - r) + arctan(r / (2 - r))` on `|theta± - theta_j|`,
/// taking the worst modulus and the worst argument separately.
pub fn sector_bound_half_width(r: f64) -> Result<f64> {
    check_regime(r)?;
    Ok((1.0 - r).acos() + (r / (2.0 - r)).atan())
}

/// Exact half width of the union of `I(w)` over the support disc
/// `B((2 - r) e^{i theta_j}, r)`.
///
/// `I(w)` is the set of `theta` with `|e^{i theta} - w| < 1`, so the union is
/// `{ theta : |e^{i theta} - c_j| < 1 + r }`, whose half width is
/// `arccos((2 - 3r) / (2 - r))`. Never larger than [`sector_bound_half_width`].
pub fn certified_half_width(r: f64) -> Result<f64> {
    check_regime(r)?;
    Ok(((2.0 - 3.0 * r) / (2.0 - r)).clamp(-1.0, 1.0).acos())
}

/// Interval containing `I(w)` for all `w` in the support of the `j`-th bump.
pub fn component_interval(n: usize, r: f64, j: usize) -> Result<AngularInterval> {
    if n == 0 || j == 0 || j > n {
        return Err(Error::Domain(format!("component index {j} out of range 1..={n}")));
    }
    AngularInterval::new(direction(n, j), certified_half_width(r)?)
}

/// Outcome of the pairwise disjointness check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessCertificate {
    pub n: usize,
    pub r: f64,
    /// Exact half width of each interval.
    pub half_width: f64,
    pub disjoint: bool,
    /// Smallest signed gap between consecutive intervals (radians).
    pub min_gap: f64,
    /// Half width from the two-step sector bound, and whether it alone
    /// separates the intervals.
    pub bound_half_width: f64,
    pub bound_disjoint: bool,
}

/// Certifies pairwise disjointness of the interaction regions for the
/// admissible radius.
pub fn certify_disjoint(n: usize) -> Result<DisjointnessCertificate> {
    certify_disjoint_with_radius(n, admissible_radius(n)?)
}

/// Same check for an arbitrary radius (used for negative controls).
///
/// Intervals share a half width and are equally spaced, so consecutive pairs
/// (including the wrap-around pair) realise the minimum gap.
pub fn certify_disjoint_with_radius(n: usize, r: f64) -> Result<DisjointnessCertificate> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    let intervals = (1..=n)
        .map(|j| component_interval(n, r, j))
        .collect::<Result<Vec<_>>>()?;
    let min_gap = (0..n)
        .map(|j| intervals[j].gap(&intervals[(j + 1) % n]))
        .fold(f64::INFINITY, f64::min);
    let bound_half_width = sector_bound_half_width(r)?;
    Ok(DisjointnessCertificate {
        n,
        r,
        half_width: intervals[0].half_width,
        disjoint: min_gap > 0.0,
        min_gap,
        bound_half_width,
        bound_disjoint: 2.0 * bound_half_width < TAU / n as f64,
    })
}
