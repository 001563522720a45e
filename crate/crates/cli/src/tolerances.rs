//! Verdict tolerances that a run may override by name.

use std::collections::BTreeMap;

use qbs_core::tolerance;

use crate::error::CliError;

pub const DEFAULTS: [(&str, f64); 7] = [
    ("coefficient_structure", tolerance::COEFFICIENT_STRUCTURE),
    ("hedge_reconstruction", tolerance::HEDGE_RECONSTRUCTION),
    ("ito_power", tolerance::ITO_POWER),
    ("pde_residual", tolerance::PDE_RESIDUAL),
    ("replication_mean_abs", tolerance::REPLICATION_MEAN_ABS),
    (
        "semigroup_superoperator",
        tolerance::SEMIGROUP_SUPEROPERATOR,
    ),
    ("terminal_limit", tolerance::TERMINAL_LIMIT),
];

pub(crate) fn check_override(name: &str, value: f64) -> Result<(), CliError> {
    if !DEFAULTS.iter().any(|(n, _)| *n == name) {
        let known: Vec<&str> = DEFAULTS.iter().map(|(n, _)| *n).collect();
        return Err(CliError::Config(format!(
            "tolerances.{name}: unknown tolerance (known: {})",
            known.join(", ")
        )));
    }
    if !(value > 0.0 && value.is_finite()) {
        return Err(CliError::Config(format!(
            "tolerances.{name}: must be finite and > 0, got {value}"
        )));
    }
    Ok(())
}

/// `NAME=VALUE` from the command line.
pub fn parse_assignment(arg: &str) -> Result<(String, f64), CliError> {
    let (name, value) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--tol expects NAME=VALUE, got {arg:?}")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--tol {name}: {value:?} is not a number")))?;
    let name = name.trim().to_string();
    check_override(&name, value)?;
    Ok((name, value))
}

/// Effective tolerances: defaults, then config overrides, then command-line ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn resolve(config: &BTreeMap<String, f64>, cli: &[(String, f64)]) -> Self {
        let mut map: BTreeMap<String, f64> =
            DEFAULTS.iter().map(|(n, v)| (n.to_string(), *v)).collect();
        for (n, v) in config {
            map.insert(n.clone(), *v);
        }
        for (n, v) in cli {
            map.insert(n.clone(), *v);
        }
        Self(map)
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn as_map(&self) -> &BTreeMap<String, f64> {
        &self.0
    }
}
