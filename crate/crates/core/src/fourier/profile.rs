use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smooth radial cutoff: equal to 1 on `[0, lower]`, 0 on `[upper, inf)`, and
/// the smooth partition `g(upper - t) / (g(upper - t) + g(t - lower))` with
/// `g(s) = exp(-1/s)` in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub transition_lower: f64,
    pub transition_upper: f64,
}

impl Default for RadialProfile {
    fn default() -> Self {
        Self {
            transition_lower: 0.5,
            transition_upper: 1.0,
        }
    }
}

impl RadialProfile {
    pub fn new(transition_lower: f64, transition_upper: f64) -> Result<Self> {
        if !(transition_lower > 0.0 && transition_upper > transition_lower) {
            return Err(Error::Domain(format!(
                "profile transition must satisfy 0 < lower < upper, got [{transition_lower}, {transition_upper}]"
            )));
        }
        Ok(Self {
            transition_lower,
            transition_upper,
        })
    }

    /// Checked evaluation; negative arguments are rejected.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::Domain(format!("profile argument must be >= 0, got {t}")));
        }
        Ok(self.value(t))
    }

    /// Unchecked evaluation for hot loops. Support tests are exact comparisons.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        let (a, b) = (self.transition_lower, self.transition_upper);
        if t <= a {
            1.0
        } else if t >= b {
            0.0
        } else {
            // 1 / (1 + g(t-a)/g(b-t)); exp overflow to +inf yields exactly 0.
            1.0 / (1.0 + (1.0 / (b - t) - 1.0 / (t - a)).exp())
        }
    }

    /// `1 - psi(t)`, computed without cancellation.
    #[inline]
    pub fn complement(&self, t: f64) -> f64 {
        let (a, b) = (self.transition_lower, self.transition_upper);
        if t <= a {
            0.0
        } else if t >= b {
            1.0
        } else {
            1.0 / (1.0 + (1.0 / (t - a) - 1.0 / (b - t)).exp())
        }
    }

    /// `psi'(t) = -psi (1 - psi) (1/(b-t)^2 + 1/(t-a)^2)`.
    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        let (a, b) = (self.transition_lower, self.transition_upper);
        if t <= a || t >= b {
            return 0.0;
        }
        let p = self.value(t);
        let q = self.complement(t);
        let (u, v) = (b - t, t - a);
        -p * q * (1.0 / (u * u) + 1.0 / (v * v))
    }

    /// Support radius of the profile (first point where it vanishes).
    pub fn support(&self) -> f64 {
        self.transition_upper
    }
}
