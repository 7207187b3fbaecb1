//! Bessel functions of the first kind.
//!
//! Backed by the `libm` port of the FreeBSD msun routines, which combine
//! rational approximations on [0, 8] with the Hankel asymptotic form and
//! argument-reduced phases beyond. Absolute error stays near 1e-16 through
//! the range used here.

/// `J_0(z)` for `z >= 0`.
pub fn j0(z: f64) -> f64 {
    debug_assert!(z >= 0.0, "j0 expects a non-negative argument, got {z}");
    libm::j0(z)
}

/// `J_1(z)` for `z >= 0`.
pub fn j1(z: f64) -> f64 {
    debug_assert!(z >= 0.0, "j1 expects a non-negative argument, got {z}");
    libm::j1(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series, summed until the terms stop contributing.
    fn j0_series(z: f64) -> f64 {
        let q = -(z * z) / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / (k as f64 * k as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    /// Periodic trapezoid on J0(z) = (1/2pi) \int cos(z sin t) dt; exact up to
    /// J_N(z) aliasing, negligible for N well above z.
    fn j0_trapezoid(z: f64) -> f64 {
        let n = (z as usize) + 200;
        let s: f64 = (0..n)
            .map(|k| (z * (std::f64::consts::TAU * k as f64 / n as f64).sin()).cos())
            .sum();
        s / n as f64
    }

    #[test]
    fn j0_at_zero() {
        assert_eq!(j0(0.0), 1.0);
    }

    #[test]
    fn j0_at_one_matches_series() {
        let oracle = j0_series(1.0);
        assert!((oracle - 0.765197686558).abs() < 1e-12);
        assert!((j0(1.0) - oracle).abs() < 1e-15);
    }

    #[test]
    fn first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if j0_series(lo) * j0_series(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo - 2.404825557696).abs() < 1e-11);
        assert!(j0(2.404825557696).abs() < 1e-10);
    }

    #[test]
    fn series_agreement_small_arguments() {
        for i in 0..=80 {
            let z = i as f64 * 0.1;
            assert!((j0(z) - j0_series(z)).abs() < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn trapezoid_agreement_large_arguments() {
        for &z in &[10.0, 37.5, 100.0, 812.25, 1000.0, 4321.0, 9999.5, 10000.0] {
            let d = (j0(z) - j0_trapezoid(z)).abs();
            assert!(d < 1e-12, "z = {z}: |diff| = {d:e}");
        }
    }

    #[test]
    fn bessel_ode_residual() {
        let h = 1e-4;
        for &z in &[1.0, 5.0, 20.0] {
            let d2 = (j0(z + h) - 2.0 * j0(z) + j0(z - h)) / (h * h);
            let d1 = (j0(z + h) - j0(z - h)) / (2.0 * h);
            let res = d2 + d1 / z + j0(z);
            assert!(res.abs() <= 1e-5, "z = {z}: residual {res:e}");
            // J0' = -J1
            assert!((d1 + j1(z)).abs() < 1e-7);
        }
    }
}
