//! Reasonable price and the replicating stock/bond holdings.

use serde::Serialize;

use super::closed_form::{g_arg, log_moneyness, prepare, price, strike_weighted, unit_greeks};
use super::model::{MarketModel, PriceQuote};
use crate::error::{QbsError, Result};
use crate::ito::{expectation, UnitVector};
use crate::operator::{normal_cdf, HermitianMatrix};

/// Price at inception, `ω(T, z_0)` with `K e^{z_0} = X`, and its expectation
/// in `state` when one is given.
pub fn reasonable_price(model: &MarketModel, state: Option<&UnitVector>) -> Result<PriceQuote> {
    let z0 = log_moneyness(&model.ops.x, &model.strike)?;
    let mut quote = price(model.maturity, &z0, model)?;
    if let Some(u) = state {
        quote.omega_expectation = Some(expectation(u, quote.omega.matrix())?.re);
    }
    Ok(quote)
}

/// Which operator plays the role of the stock holding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaConvention {
    /// `a = ω_{01}(T − t, z_t)`, the derivative in log-moneyness.
    LogMoneyness,
    /// `a = ω_{01} · j_X^{-1} = Φ(g)`, the chain-rule delta in the stock.
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgePosition {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub value: HermitianMatrix,
    pub beta_t: f64,
    pub time_to_maturity: f64,
    pub convention: DeltaConvention,
}

impl HedgePosition {
    /// `a ∘ j_X + b β_t`.
    pub fn reconstruct(&self, j_x: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.a
            .jordan_product(j_x)?
            .try_add(&self.b.scale(self.beta_t))
    }

    /// `‖a ∘ j_X + b β_t − V‖_F / max(1, ‖V‖_F)`.
    pub fn reconstruction_defect(&self, j_x: &HermitianMatrix) -> Result<f64> {
        let diff = self.reconstruct(j_x)?.try_sub(&self.value)?;
        Ok(diff.matrix().norm_fro() / self.value.matrix().norm_fro().max(1.0))
    }
}

/// Holdings at calendar time `t ∈ (0, T)` given the stock operator `j_X`.
pub fn hedge_portfolio(
    t: f64,
    j_x: &HermitianMatrix,
    model: &MarketModel,
    convention: DeltaConvention,
) -> Result<HedgePosition> {
    if !(t > 0.0 && t < model.maturity) {
        return Err(QbsError::invalid(
            "t",
            format!("must lie in (0, {}), got {t}", model.maturity),
        ));
    }
    let tau = model.maturity - t;
    let r = model.rate;
    let z = log_moneyness(j_x, &model.strike)?;
    let spec = prepare(tau, &z, model)?;
    let value = strike_weighted(&spec, &model.strike, |x| unit_greeks(tau, x, r).value)?;
    let a = match convention {
        DeltaConvention::LogMoneyness => {
            strike_weighted(&spec, &model.strike, |x| unit_greeks(tau, x, r).d_z)?
        }
        DeltaConvention::Classical => spec.apply(|x| normal_cdf(g_arg(tau, x, r)))?,
    };
    let stock = a.jordan_product(j_x)?;
    let b = value.try_sub(&stock)?.scale((-t * r).exp() / model.beta0);
    Ok(HedgePosition {
        a,
        b,
        value,
        beta_t: model.bond(t),
        time_to_maturity: tau,
        convention,
    })
}
