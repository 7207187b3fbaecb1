//! One-dimensional Gauss-Legendre rules and polar tensor grids on planar regions.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the three-term recurrence, started from the
    /// Chebyshev-like guess `cos(pi (i + 3/4) / (q + 1/2))`.
    pub fn new(q: usize) -> Self {
        assert!(q >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; q];
        let mut weights = vec![0.0; q];
        let m = q.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(q, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(q, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[q - 1 - i] = x;
            weights[i] = w;
            weights[q - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn sixteen() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn integrate_panels<F: Fn(f64) -> f64>(&self, a: f64, b: f64, panels: usize, f: F) -> f64 {
        let panels = panels.max(1);
        let step = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + step * k as f64;
                self.integrate(lo, lo + step, &f)
            })
            .sum()
    }
}

/// Value and derivative of the Legendre polynomial `P_q` at `x`.
fn legendre(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=q {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if q == 0 {
        return (1.0, 0.0);
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Planar integration region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// Disc with the given centre; the angular origin of the polar grid is
    /// aligned with the direction of the centre.
    Disc { center: Point, radius: f64 },
    /// `{ inner <= |x| <= outer, start <= arg x <= start + width }`.
    AnnularSector {
        inner: f64,
        outer: f64,
        start: f64,
        width: f64,
    },
    /// `{ |xi| < 1 } ∩ { |xi - center| < reach }`, the part of the unit disc
    /// that can interact with a symbol supported near `center`.
    LensNeighborhood { center: Point, reach: f64 },
}

impl Region {
    pub const UNIT_DISC: Region = Region::Disc {
        center: Point::ORIGIN,
        radius: 1.0,
    };
    pub const DOUBLE_DISC: Region = Region::Disc {
        center: Point::ORIGIN,
        radius: 2.0,
    };

    /// Parses `unit-disc`, `double-disc`, or `disc:<radius>`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "unit-disc" => Ok(Self::UNIT_DISC),
            "double-disc" => Ok(Self::DOUBLE_DISC),
            other => {
                if let Some(radius) = other.strip_prefix("disc:") {
                    let radius: f64 = radius
                        .parse()
                        .map_err(|_| Error::Config(format!("bad disc radius in {other:?}")))?;
                    if radius > 0.0 {
                        return Ok(Region::Disc {
                            center: Point::ORIGIN,
                            radius,
                        });
                    }
                }
                Err(Error::Config(format!("unknown region {other:?}")))
            }
        }
    }

    /// Closed-form area.
    pub fn area(&self) -> f64 {
        match *self {
            Region::Disc { radius, .. } => PI * radius * radius,
            Region::AnnularSector {
                inner, outer, width, ..
            } => 0.5 * width * (outer * outer - inner * inner),
            Region::LensNeighborhood { center, reach } => two_disc_intersection(1.0, reach, center.norm()),
        }
    }
}

/// Area of the intersection of discs of radii `a`, `b` with centres `d` apart.
pub(crate) fn two_disc_intersection(a: f64, b: f64, d: f64) -> f64 {
    if d >= a + b {
        return 0.0;
    }
    if d <= (a - b).abs() {
        let m = a.min(b);
        return PI * m * m;
    }
    let alpha = ((d * d + a * a - b * b) / (2.0 * d * a)).clamp(-1.0, 1.0).acos();
    let beta = ((d * d + b * b - a * a) / (2.0 * d * b)).clamp(-1.0, 1.0).acos();
    let k = (-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b);
    a * a * alpha + b * b * beta - 0.5 * k.max(0.0).sqrt()
}

/// Quadrature nodes and strictly positive weights over a planar region.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanarGrid {
    pub region: Region,
    /// Maximum nominal node spacing.
    pub h: f64,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl PlanarGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: Fn(Point) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    /// Keeps the nodes for which `keep` holds, preserving order.
    pub fn restrict<F: Fn(Point) -> bool>(&self, region: Region, keep: F) -> PlanarGrid {
        let (nodes, weights) = self
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| keep(**p))
            .map(|(&p, &w)| (p, w))
            .unzip();
        PlanarGrid {
            region,
            h: self.h,
            nodes,
            weights,
        }
    }

    /// Grid rotated about the origin.
    pub fn rotated(&self, angle: f64) -> PlanarGrid {
        let region = match self.region {
            Region::Disc { center, radius } => Region::Disc {
                center: center.rotate(angle),
                radius,
            },
            Region::AnnularSector {
                inner,
                outer,
                start,
                width,
            } => Region::AnnularSector {
                inner,
                outer,
                start: start + angle,
                width,
            },
            Region::LensNeighborhood { center, reach } => Region::LensNeighborhood {
                center: center.rotate(angle),
                reach,
            },
        };
        PlanarGrid {
            region,
            h: self.h,
            nodes: self.nodes.iter().map(|p| p.rotate(angle)).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Points per radial Gauss-Legendre panel.
const PANEL_POINTS: usize = 4;

/// Polar tensor grid: composite Gauss-Legendre in radius (panel length
/// `PANEL_POINTS * h`) times a uniform rule in angle with spacing `<= h`.
pub fn disc_quadrature(region: &Region, h: f64) -> Result<PlanarGrid> {
    disc_quadrature_folded(region, h, 1)
}

/// Like [`disc_quadrature`], but full rings carry an angular node count that
/// is a multiple of `fold`, starting at angle 0, so the grid of a centred disc
/// is invariant under rotation by `2 pi / fold`.
pub fn disc_quadrature_folded(region: &Region, h: f64, fold: usize) -> Result<PlanarGrid> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("grid spacing must be positive, got {h}")));
    }
    let fold = fold.max(1);
    let rule = GaussLegendre::new(PANEL_POINTS);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();

    let radial = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
        let panels = ((hi - lo) / (PANEL_POINTS as f64 * h)).ceil().max(1.0) as usize;
        let step = (hi - lo) / panels as f64;
        (0..panels)
            .flat_map(|k| {
                let a = lo + step * k as f64;
                rule.mapped(a, a + step).collect::<Vec<_>>()
            })
            .collect()
    };
    let full_ring = |rho: f64| -> usize {
        let m = ((TAU * rho / h).ceil() as usize).max(8);
        m.div_ceil(fold) * fold
    };

    match *region {
        Region::Disc { center, radius } => {
            if !(radius > 0.0) {
                return Err(Error::Config(format!("disc radius must be positive, got {radius}")));
            }
            let origin = if center.norm() > 0.0 { center.arg() } else { 0.0 };
            for (rho, wr) in radial(0.0, radius) {
                let m = full_ring(rho);
                let dth = TAU / m as f64;
                for k in 0..m {
                    nodes.push(center + Point::polar(rho, origin + dth * k as f64));
                    weights.push(wr * rho * dth);
                }
            }
        }
        Region::AnnularSector {
            inner,
            outer,
            start,
            width,
        } => {
            if !(inner >= 0.0 && outer > inner && width > 0.0 && width <= TAU) {
                return Err(Error::Config(format!("malformed annular sector {region:?}")));
            }
            for (rho, wr) in radial(inner, outer) {
                let m = ((width * rho / h).ceil() as usize).max(4);
                let dth = width / m as f64;
                for k in 0..m {
                    nodes.push(Point::polar(rho, start + dth * (k as f64 + 0.5)));
                    weights.push(wr * rho * dth);
                }
            }
        }
        Region::LensNeighborhood { center, reach } => {
            let d = center.norm();
            if !(reach > 0.0 && d > 0.0 && d < 1.0 + reach) {
                return Err(Error::Config(format!("malformed lens neighborhood {region:?}")));
            }
            let axis = center.arg();
            let lo = (d - reach).max(0.0);
            for (rho, wr) in radial(lo, 1.0) {
                let kappa = (d * d + rho * rho - reach * reach) / (2.0 * rho * d);
                if kappa >= 1.0 {
                    continue;
                }
                if kappa <= -1.0 {
                    let m = full_ring(rho);
                    let dth = TAU / m as f64;
                    for k in 0..m {
                        nodes.push(Point::polar(rho, axis + dth * k as f64));
                        weights.push(wr * rho * dth);
                    }
                } else {
                    let half = kappa.acos();
                    let m = ((2.0 * half * rho / h).ceil() as usize).max(2);
                    let dth = 2.0 * half / m as f64;
                    for k in 0..m {
                        nodes.push(Point::polar(rho, axis - half + dth * (k as f64 + 0.5)));
                        weights.push(wr * rho * dth);
                    }
                }
            }
        }
    }

    Ok(PlanarGrid {
        region: *region,
        h,
        nodes,
        weights,
    })
}
