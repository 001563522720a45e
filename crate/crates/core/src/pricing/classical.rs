//! Scalar Black-Scholes call with general volatility.

use serde::Serialize;

use super::model::require_positive;
use crate::error::{QbsError, Result};
use crate::operator::normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalQuote {
    pub price: f64,
    pub delta: f64,
}

/// European call on stock `x`, strike `k`, rate `r`, volatility `sigma`,
/// time to maturity `t`.
pub fn classical_bs(x: f64, k: f64, r: f64, sigma: f64, t: f64) -> Result<ClassicalQuote> {
    require_positive("x", x)?;
    require_positive("K", k)?;
    require_positive("sigma", sigma)?;
    require_positive("t", t)?;
    if !r.is_finite() {
        return Err(QbsError::invalid("r", format!("must be finite, got {r}")));
    }
    let vol = sigma * t.sqrt();
    let g = ((x / k).ln() + (r + 0.5 * sigma * sigma) * t) / vol;
    let delta = normal_cdf(g);
    Ok(ClassicalQuote {
        price: x * delta - k * (-r * t).exp() * normal_cdf(g - vol),
        delta,
    })
}
