//! Terminal payoff `(K e^{z_T} − K)^+` and the short-maturity limit of the price.

use serde::Serialize;

use super::closed_form::price;
use super::model::{MarketModel, ResidualReport};
use crate::error::{QbsError, Result};
use crate::ito::{expectation, UnitVector};
use crate::operator::{
    apply_scalar_function, check_commuting, positive_part, spectral_decompose, HermitianMatrix,
};
use crate::tolerance;

/// How the call payoff of an operator-valued stock is read off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PayoffConvention<'a> {
    /// Spectral positive part of `K e^{z_T} − K`.
    Spectral,
    /// `max(0, ⟨u, (K e^{z_T} − K) u⟩)` for the given state.
    Expectation(&'a UnitVector),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Payoff {
    Operator(HermitianMatrix),
    Scalar(f64),
}

/// `K e^{z_T} − K`, formed as `K ∘ expm1(z_T)` so small `z_T` keeps precision.
fn intrinsic(z_t: &HermitianMatrix, strike: &HermitianMatrix) -> Result<HermitianMatrix> {
    if z_t.dim() != strike.dim() {
        return Err(QbsError::DimensionMismatch {
            left: z_t.dim(),
            right: strike.dim(),
        });
    }
    check_commuting(z_t, strike, tolerance::COMMUTATION)?;
    strike.jordan_product(&apply_scalar_function(z_t, f64::exp_m1)?)
}

pub fn terminal_payoff(
    z_t: &HermitianMatrix,
    strike: &HermitianMatrix,
    convention: PayoffConvention<'_>,
) -> Result<Payoff> {
    let m = intrinsic(z_t, strike)?;
    match convention {
        PayoffConvention::Spectral => Ok(Payoff::Operator(positive_part(&m)?)),
        PayoffConvention::Expectation(state) => {
            Ok(Payoff::Scalar(expectation(state, m.matrix())?.re.max(0.0)))
        }
    }
}

/// Spectral payoff as an operator.
pub fn spectral_payoff(z_t: &HermitianMatrix, strike: &HermitianMatrix) -> Result<HermitianMatrix> {
    positive_part(&intrinsic(z_t, strike)?)
}

/// `‖ω(t_small, z_T) − (K e^{z_T} − K)^+‖` against
/// `TERMINAL_LIMIT · max(1, ‖payoff‖)`, spectral norms throughout.
pub fn terminal_limit_check(
    z_t: &HermitianMatrix,
    model: &MarketModel,
    t_small: f64,
) -> Result<ResidualReport> {
    terminal_limit_check_with_gap(z_t, model, t_small, tolerance::TERMINAL_SPECTRAL_GAP)
}

/// As [`terminal_limit_check`] with an explicit spectral gap `delta`:
/// every eigenvalue of `z_T` must satisfy `|λ| ≥ delta`.
pub fn terminal_limit_check_with_gap(
    z_t: &HermitianMatrix,
    model: &MarketModel,
    t_small: f64,
    delta: f64,
) -> Result<ResidualReport> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(QbsError::invalid(
            "delta",
            format!("must be > 0, got {delta}"),
        ));
    }
    let spec = spectral_decompose(z_t)?;
    if let Some(&eigenvalue) = spec.eigenvalues.iter().find(|x| x.abs() < delta) {
        return Err(QbsError::SpectrumNearZero { eigenvalue, delta });
    }
    let payoff = spectral_payoff(z_t, &model.strike)?;
    let quote = price(t_small, z_t, model)?;
    let gap = spectral_decompose(&quote.omega.try_sub(&payoff)?)?.spectral_radius();
    let scale = spectral_decompose(&payoff)?.spectral_radius().max(1.0);
    let grid = spec.eigenvalues.iter().map(|&x| (t_small, x)).collect();
    Ok(ResidualReport::new(
        gap,
        tolerance::TERMINAL_LIMIT * scale,
        grid,
    ))
}
