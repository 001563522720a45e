//! Finite-dimensional quantum Black-Scholes model.
//!
//! * [`operator`]: complex matrices, Hermitian functional calculus, the
//!   normal CDF and the `[X, L] = W X` construction.
//! * [`ito`]: quantum stochastic differentials, the Itô table, flow
//!   coefficients and the vacuum (Lindblad) semigroup.
//! * [`pricing`]: the closed-form operator price, its derivatives, PDE
//!   residuals, terminal checks, hedging and a scalar replication test.

pub mod error;
pub mod ito;
pub mod operator;
pub mod pricing;
pub mod random;
pub mod tolerance;

pub use error::{QbsError, Result};
