//! Closed-form operator price, residuals, terminal checks and hedging.

mod classical;
mod closed_form;
mod model;
mod portfolio;
mod replication;
mod residual;
mod terminal;

pub use classical::{classical_bs, ClassicalQuote};
pub use closed_form::{
    g_arg, g_h_arguments, h_arg, log_moneyness, price, price_derivatives, unit_greeks, unit_price,
    PriceDerivatives, UnitGreeks,
};
pub use model::{MarketModel, PriceQuote, ResidualReport};
pub use portfolio::{hedge_portfolio, reasonable_price, DeltaConvention, HedgePosition};
pub use replication::{
    replication_simulation, ReplicationConfig, ReplicationStats, MIN_PATHS, MIN_STEPS,
};
pub use residual::{
    residual_brownian_scalar, residual_eq8, residual_eq8_candidate, residual_eq8_grid,
    residual_poisson_scalar, unit_residual_eq8, FdSteps, PoissonResidual, SmoothSurface, FD_STEP,
};
pub use terminal::{
    spectral_payoff, terminal_limit_check, terminal_limit_check_with_gap, terminal_payoff, Payoff,
    PayoffConvention,
};
