//! Pinned numerical tolerances.
//!
//! Every threshold the checks use lives here so that reports can echo the
//! value that produced a verdict. Scaled tolerances are multiplied by
//! `max(1, ‖M‖_F)` (or by the dimension, for unitarity) at the call site.

/// Hermiticity at construction: `‖M − M*‖_F ≤ HERMITIAN · max(1, ‖M‖_F)`.
pub const HERMITIAN: f64 = 1e-12;

/// Unitarity at construction: `‖M*M − I‖_F ≤ UNITARY · dim`.
pub const UNITARY: f64 = 1e-12;

/// Spectral reconstruction and orthonormality of eigenvectors.
pub const SPECTRAL_RECONSTRUCTION: f64 = 1e-10;

/// Normalization of state vectors.
pub const STATE_NORM: f64 = 1e-12;

/// Commutation of the strike with the stock (or log-moneyness) operator,
/// relative to `‖A‖_F · ‖B‖_F`.
pub const COMMUTATION: f64 = 1e-10;

/// Eigenbasis diagonal of `W` and eigenvalue separation in the `L` construction.
pub const SYLVESTER: f64 = 1e-10;

/// Closed-form vs iterated Itô powers, relative per slot.
pub const ITO_POWER: f64 = 1e-10;

/// Structure of the flow coefficients (`α† = α*`, `λ`, `θ` Hermitian).
pub const COEFFICIENT_STRUCTURE: f64 = 1e-12;

/// Brownian reduction: `λ` and the bracket formulas, scaled.
pub const BROWNIAN_REDUCTION: f64 = 1e-14;

/// Interior deviation of `λ` from the identity in the truncated Poisson model.
pub const POISSON_INTERIOR: f64 = 1e-14;

/// PDE residual of the closed-form price.
pub const PDE_RESIDUAL: f64 = 1e-6;

/// Terminal limit, scaled by `max(1, ‖payoff‖)`.
pub const TERMINAL_LIMIT: f64 = 1e-6;

/// Smallest time used by the terminal limit check.
pub const TERMINAL_T_SMALL: f64 = 1e-8;

/// Required distance of the terminal log-moneyness spectrum from zero.
pub const TERMINAL_SPECTRAL_GAP: f64 = 0.1;

/// Hedge reconstruction `a·x + b·β_t = ω`.
pub const HEDGE_RECONSTRUCTION: f64 = 1e-10;

/// Hermiticity of the evolved observable.
pub const SEMIGROUP_HERMITIAN: f64 = 1e-9;

/// Fixed-step integration vs exact superoperator exponential.
pub const SEMIGROUP_SUPEROPERATOR: f64 = 1e-8;

/// Mean absolute replication error as a fraction of the initial stock price.
pub const REPLICATION_MEAN_ABS: f64 = 0.01;
