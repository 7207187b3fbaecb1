//! Radial inverse Fourier transform of the bump and its spatial tail mass.

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use super::bessel::j1;
use super::profile::RadialProfile;
use super::quadrature::GaussLegendre;
use crate::error::{Error, Result};
use crate::par;

/// Width of the chunks used to accumulate the spatial tail.
const TAIL_CHUNK: f64 = 0.05;
/// Chunks per stopping window (two units of `s`, covering several oscillations).
const TAIL_WINDOW: usize = 40;
/// Relative size below which the tail integrand is considered exhausted.
const TAIL_CUTOFF: f64 = 1e-14;
/// Chunks evaluated per batch while searching for the cutoff.
const TAIL_BATCH: usize = 400;

/// The spatial bump `b(x) = \int b^(xi) e^{2 pi i x.xi} dxi` for a radial
/// profile, together with a table of its tail masses.
#[derive(Debug)]
pub struct SpatialBump {
    profile: RadialProfile,
    /// `chunk_mass[k] = 2 pi \int_{kD}^{(k+1)D} |b(s)| s ds`.
    chunk_mass: Vec<f64>,
    /// `suffix[k] = sum_{i >= k} chunk_mass[i]`.
    suffix: Vec<f64>,
    truncation: f64,
}

/// Tail mass `\int_{|x| > rho} |b(x)| dx` with an estimate of the truncated part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailMass {
    pub value: f64,
    pub truncation_error: f64,
}

impl SpatialBump {
    pub fn new(profile: RadialProfile) -> Self {
        let mut chunk_mass: Vec<f64> = Vec::new();
        let mut total = 0.0;
        loop {
            let start = chunk_mass.len();
            let batch = par::map_range(TAIL_BATCH, |i| chunk(&profile, start + i));
            for m in batch {
                total += m;
                chunk_mass.push(m);
                let n = chunk_mass.len();
                if n >= TAIL_WINDOW {
                    let recent = &chunk_mass[n - TAIL_WINDOW..];
                    let peak = recent.iter().cloned().fold(0.0, f64::max);
                    if peak < TAIL_CUTOFF * total {
                        return Self::finish(profile, chunk_mass);
                    }
                }
            }
        }
    }

    fn finish(profile: RadialProfile, chunk_mass: Vec<f64>) -> Self {
        let n = chunk_mass.len();
        let truncation: f64 = chunk_mass[n.saturating_sub(TAIL_WINDOW)..].iter().sum();
        let mut suffix = vec![0.0; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] + chunk_mass[k];
        }
        Self {
            profile,
            chunk_mass,
            suffix,
            truncation,
        }
    }

    /// Process-wide cached instance for `profile`.
    pub fn shared(profile: &RadialProfile) -> Arc<SpatialBump> {
        static CACHE: OnceLock<Mutex<Vec<Arc<SpatialBump>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        if let Some(hit) = cache
            .lock()
            .expect("bump cache poisoned")
            .iter()
            .find(|b| b.profile == *profile)
        {
            return Arc::clone(hit);
        }
        let built = Arc::new(SpatialBump::new(*profile));
        let mut guard = cache.lock().expect("bump cache poisoned");
        if let Some(hit) = guard.iter().find(|b| b.profile == *profile) {
            return Arc::clone(hit);
        }
        guard.push(Arc::clone(&built));
        built
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// `b(s)` for `|x| = s`.
    pub fn value(&self, s: f64) -> f64 {
        spatial_bump(&self.profile, s)
    }

    /// Radius beyond which the tail is treated as negligible.
    pub fn cutoff_radius(&self) -> f64 {
        self.chunk_mass.len() as f64 * TAIL_CHUNK
    }

    /// `\int_{|x| > rho} |b(x)| dx`.
    pub fn tail_mass(&self, rho: f64) -> TailMass {
        let rho = rho.max(0.0);
        let k = (rho / TAIL_CHUNK).floor() as usize;
        if k >= self.chunk_mass.len() {
            return TailMass {
                value: 0.0,
                truncation_error: self.truncation,
            };
        }
        let end = (k + 1) as f64 * TAIL_CHUNK;
        let partial = if rho > k as f64 * TAIL_CHUNK {
            abs_mass(&self.profile, rho, end)
        } else {
            self.chunk_mass[k]
        };
        TailMass {
            value: partial + self.suffix[k + 1],
            truncation_error: self.truncation,
        }
    }

    /// `\int |b(x)| dx`.
    pub fn l1_norm(&self) -> f64 {
        self.suffix[0]
    }
}

fn chunk(profile: &RadialProfile, k: usize) -> f64 {
    let a = k as f64 * TAIL_CHUNK;
    abs_mass(profile, a, a + TAIL_CHUNK)
}

/// `2 pi \int_a^b |b(s)| s ds` with an 8-point rule on each of two halves.
/// A sign change of `b` splits the interval at the zero, so every piece has a
/// smooth integrand.
fn abs_mass(profile: &RadialProfile, a: f64, b: f64) -> f64 {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(8));
    let f = |s: f64| spatial_bump(profile, s);
    let piece = |lo: f64, hi: f64| TAU * rule.integrate_panels(lo, hi, 2, |s| f(s).abs() * s);
    let (fa, fb) = (f(a), f(b));
    if fa * fb < 0.0 {
        let z = sign_change(&f, a, b, fa, fb);
        piece(a, z) + piece(z, b)
    } else {
        piece(a, b)
    }
}

/// Zero of `f` in `[a, b]` by the Illinois variant of regula falsi.
fn sign_change<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0;
    for _ in 0..60 {
        let z = (a * fb - b * fa) / (fb - fa);
        let fz = f(z);
        if fz == 0.0 {
            return z;
        }
        if fz * fb > 0.0 {
            b = z;
            fb = fz;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = z;
            fa = fz;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    0.5 * (a + b)
}

/// The unscaled spatial bump `b(s) = 2 pi \int_0^1 psi(rho) J0(2 pi rho s) rho drho`.
///
/// For `s > 0` the plateau is integrated by parts against `rho J1`, leaving
/// `b(s) = -(1/s) \int_lower^upper psi'(rho) rho J1(2 pi s rho) drho`, which has
/// no cancellation between plateau and transition for large `s`.
pub fn spatial_bump(profile: &RadialProfile, s: f64) -> f64 {
    let (a, b) = (profile.transition_lower, profile.transition_upper);
    let rule = GaussLegendre::sixteen();
    if s == 0.0 {
        let panels = 24;
        let ramp = rule.integrate_panels(a, b, panels, |rho| profile.value(rho) * rho);
        return TAU * (0.5 * a * a + ramp);
    }
    let s = s.abs();
    let panels = (2.0 * s * (b - a)).ceil().max(24.0) as usize;
    let k = TAU * s;
    // J1(k rho) / s written as 2 pi rho * J1(x)/x to stay accurate as s -> 0.
    let integral = rule.integrate_panels(a, b, panels, |rho| {
        let x = k * rho;
        let j1_over_s = if x < 1e-8 {
            PI * rho * (1.0 - x * x / 8.0)
        } else {
            TAU * rho * j1(x) / x
        };
        profile.derivative(rho) * rho * j1_over_s
    });
    -integral
}

/// Scaled spatial bump `b_r(x) = r^2 b(r |x|)` at `|x| = s`.
pub fn inverse_radial_transform(profile: &RadialProfile, r: f64, s: f64) -> Result<f64> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::Domain(format!("bump scale must lie in (0, 1/2), got {r}")));
    }
    if s < 0.0 || s.is_nan() {
        return Err(Error::Domain(format!("radius must be >= 0, got {s}")));
    }
    Ok(r * r * spatial_bump(profile, r * s))
}

/// `\int_{|x| > rho} |b(x)| dx`, using the process-wide table for `profile`.
pub fn tail_mass(profile: &RadialProfile, rho: f64) -> TailMass {
    SpatialBump::shared(profile).tail_mass(rho)
}
