//! The standard normal distribution function.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{QbsError, Result};

/// Largest |x| accepted by [`phi_series`]; beyond it the alternating series
/// loses too many digits to cancellation.
pub const PHI_SERIES_WINDOW: f64 = 3.0;

/// `Φ(x) = ½ erfc(−x/√2)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Partial sum `½ + (2π)^{-1/2} Σ_{n=0}^{n_max} (−1)^n x^{2n+1} / (2^n n! (2n+1))`
/// of the Maclaurin series of `Φ`.
pub fn phi_series(x: f64, n_max: usize) -> Result<f64> {
    if !x.is_finite() || x.abs() > PHI_SERIES_WINDOW {
        return Err(QbsError::invalid(
            "x",
            format!("series is only evaluated for |x| <= {PHI_SERIES_WINDOW}, got {x}"),
        ));
    }
    if n_max < 1 {
        return Err(QbsError::invalid("n_max", "must be at least 1"));
    }
    // power_n = (−1)^n x^{2n+1} / (2^n n!)
    let mut power = x;
    let mut sum = 0.0;
    for n in 0..=n_max {
        sum += power / (2 * n + 1) as f64;
        power *= -x * x / (2.0 * (n + 1) as f64);
    }
    Ok(0.5 + sum / (2.0 * PI).sqrt())
}
