//! Closed-form operator price `ω(t, z) = K e^z Φ(g) − K Φ(h) e^{−rt}` and its
//! partial derivatives.
//!
//! Here `t` is time to maturity and `z` the log-moneyness operator
//! (`K e^z` is the stock). Because `z` commutes with `K`, every quantity is
//! `K · f(z)` for a scalar `f` applied spectrally to `z`.

use serde::Serialize;

use super::model::{require_positive, MarketModel, PriceQuote};
use crate::error::{QbsError, Result};
use crate::operator::{
    check_commuting, normal_cdf, normal_pdf, operator_log, spectral_decompose, HermitianMatrix,
    SpectralDecomposition,
};
use crate::tolerance;

/// `g = z t^{-1/2} + (r + ½) t^{1/2}`.
pub fn g_arg(t: f64, z: f64, r: f64) -> f64 {
    let s = t.sqrt();
    z / s + (r + 0.5) * s
}

/// `h = z t^{-1/2} + (r − ½) t^{1/2} = g − √t`.
pub fn h_arg(t: f64, z: f64, r: f64) -> f64 {
    let s = t.sqrt();
    z / s + (r - 0.5) * s
}

/// Price per unit strike: `e^z Φ(g) − e^{−rt} Φ(h)`.
pub fn unit_price(t: f64, z: f64, r: f64) -> f64 {
    z.exp() * normal_cdf(g_arg(t, z, r)) - (-r * t).exp() * normal_cdf(h_arg(t, z, r))
}

/// Value and partial derivatives of [`unit_price`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitGreeks {
    pub value: f64,
    pub d_t: f64,
    pub d_z: f64,
    pub d_zz: f64,
}

/// Uses `e^z φ(g) = e^{−rt} φ(h)` to collapse the density terms:
/// `∂_z = e^z Φ(g)`, `∂_z² = e^z Φ(g) + e^z φ(g)/√t`,
/// `∂_t = e^z φ(g)/(2√t) + r e^{−rt} Φ(h)`.
pub fn unit_greeks(t: f64, z: f64, r: f64) -> UnitGreeks {
    let s = t.sqrt();
    let g = g_arg(t, z, r);
    let h = g - s;
    let ez = z.exp();
    let disc = (-r * t).exp();
    let cdf_g = normal_cdf(g);
    let cdf_h = normal_cdf(h);
    let density = ez * normal_pdf(g);
    UnitGreeks {
        value: ez * cdf_g - disc * cdf_h,
        d_t: density / (2.0 * s) + r * disc * cdf_h,
        d_z: ez * cdf_g,
        d_zz: ez * cdf_g + density / s,
    }
}

/// `z = log X − log K` for commuting positive-definite `X`, `K`.
pub fn log_moneyness(x: &HermitianMatrix, strike: &HermitianMatrix) -> Result<HermitianMatrix> {
    if x.dim() != strike.dim() {
        return Err(QbsError::DimensionMismatch {
            left: x.dim(),
            right: strike.dim(),
        });
    }
    check_commuting(x, strike, tolerance::COMMUTATION)?;
    let log_x = operator_log(x)?;
    let log_k = operator_log(strike)?;
    log_x.try_sub(&log_k)
}

/// `(g, h)` as operators.
pub fn g_h_arguments(
    t: f64,
    z: &HermitianMatrix,
    r: f64,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    require_positive("t", t)?;
    let s = t.sqrt();
    let scaled = z.scale(1.0 / s);
    Ok((scaled.shift((r + 0.5) * s), scaled.shift((r - 0.5) * s)))
}

/// Spectral decomposition of `z` after checking `t > 0` and `[z, K] = 0`.
pub(crate) fn prepare(
    t: f64,
    z: &HermitianMatrix,
    model: &MarketModel,
) -> Result<SpectralDecomposition> {
    require_positive("t", t)?;
    if z.dim() != model.dim() {
        return Err(QbsError::DimensionMismatch {
            left: z.dim(),
            right: model.dim(),
        });
    }
    check_commuting(z, &model.strike, tolerance::COMMUTATION)?;
    spectral_decompose(z)
}

/// `K · f(z)` for a scalar `f`; Hermitian because `K` and `z` commute.
pub(crate) fn strike_weighted(
    spec: &SpectralDecomposition,
    strike: &HermitianMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    strike.jordan_product(&spec.apply(f)?)
}

/// Closed-form price operator at time-to-maturity `t`.
pub fn price(t: f64, z: &HermitianMatrix, model: &MarketModel) -> Result<PriceQuote> {
    let spec = prepare(t, z, model)?;
    let r = model.rate;
    let omega = strike_weighted(&spec, &model.strike, |x| unit_price(t, x, r))?;
    Ok(PriceQuote {
        t,
        z: z.clone(),
        omega,
        omega_expectation: None,
    })
}

/// `(ω_{10}, ω_{01}, ω_{02})`: derivatives in `t`, `z`, and `z` twice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceDerivatives {
    pub omega10: HermitianMatrix,
    pub omega01: HermitianMatrix,
    pub omega02: HermitianMatrix,
}

pub fn price_derivatives(
    t: f64,
    z: &HermitianMatrix,
    model: &MarketModel,
) -> Result<PriceDerivatives> {
    let spec = prepare(t, z, model)?;
    let r = model.rate;
    let k = &model.strike;
    Ok(PriceDerivatives {
        omega10: strike_weighted(&spec, k, |x| unit_greeks(t, x, r).d_t)?,
        omega01: strike_weighted(&spec, k, |x| unit_greeks(t, x, r).d_z)?,
        omega02: strike_weighted(&spec, k, |x| unit_greeks(t, x, r).d_zz)?,
    })
}
