//! Quantum Itô algebra, flow coefficients and the vacuum semigroup.

mod algebra;
mod flow;
mod semigroup;

pub use algebra::{ito_product, Integrator, QuantumStochasticDifferential};
pub use flow::{
    brownian_reduction_check, flow_coefficients, flow_differential, poisson_reduction_check,
    power_rule_suite, qsd_power_closed_form, qsd_power_iterated, BrownianReport, FlowCoefficients,
    ModelOperators, PoissonReport, PowerRuleCell, PowerRuleReport,
};
pub use semigroup::{
    default_steps, evolve_superoperator, expectation, generator_superoperator, lindblad_generator,
    semigroup_evolve, UnitVector,
};
