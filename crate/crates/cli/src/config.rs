//! Run configuration: a JSON document with row-major `[re, im]` matrices.
//!
//! [`RunConfig`] is the raw document and round-trips through serde
//! unchanged; [`RunConfig::validate`] builds the checked model, reporting
//! the offending field path on failure.

use std::collections::BTreeMap;

use num_complex::Complex64;
use qbs_core::ito::{ModelOperators, UnitVector};
use qbs_core::operator::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use qbs_core::pricing::{DeltaConvention, MarketModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Row-major rows of `[re, im]` pairs.
pub type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelConfig,
    /// System state `u`, as `[re, im]` components.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ito: Option<ItoConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<TerminalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hedge: Option<HedgeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<Vec<ClassicalCase>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lindblad: Option<LindbladConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate: Option<ReplicateConfig>,
    /// Tolerance overrides by name; see [`crate::tolerances`].
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub ops: OpsConfig,
    #[serde(rename = "K")]
    pub strike: StrikeConfig,
    pub r: f64,
    #[serde(rename = "T")]
    pub maturity: f64,
    #[serde(default = "one")]
    pub beta0: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpsConfig {
    #[serde(rename = "X")]
    pub x: RawMatrix,
    #[serde(rename = "H")]
    pub h: RawMatrix,
    #[serde(rename = "L")]
    pub l: RawMatrix,
    #[serde(rename = "S")]
    pub s: RawMatrix,
}

/// `K` as a positive scalar (times the identity) or a full matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrikeConfig {
    Scalar(f64),
    Matrix(RawMatrix),
}

/// Times to maturity and log-moneyness operators for `price` and `residual`.
/// Without `z`, the single point `z_0 = log X − log K` is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<RawMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItoConfig {
    pub dims: Vec<usize>,
    pub k_max: u32,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalConfig {
    /// Terminal log-moneyness operators; defaults to `z_0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<RawMatrix>>,
    #[serde(default = "default_t_small")]
    pub t_small: f64,
    #[serde(default = "default_gap")]
    pub delta: f64,
}

fn default_t_small() -> f64 {
    qbs_core::tolerance::TERMINAL_T_SMALL
}

fn default_gap() -> f64 {
    qbs_core::tolerance::TERMINAL_SPECTRAL_GAP
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionChoice {
    LogMoneyness,
    Classical,
    Both,
}

impl ConventionChoice {
    pub fn conventions(self) -> Vec<DeltaConvention> {
        match self {
            ConventionChoice::LogMoneyness => vec![DeltaConvention::LogMoneyness],
            ConventionChoice::Classical => vec![DeltaConvention::Classical],
            ConventionChoice::Both => {
                vec![DeltaConvention::LogMoneyness, DeltaConvention::Classical]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HedgeConfig {
    /// Calendar times in `(0, T)`.
    pub t: Vec<f64>,
    /// Stock operator `j_t(X)`; defaults to `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_x: Option<RawMatrix>,
    #[serde(default = "default_convention")]
    pub convention: ConventionChoice,
}

fn default_convention() -> ConventionChoice {
    ConventionChoice::Both
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalCase {
    pub x: f64,
    #[serde(rename = "K")]
    pub strike: f64,
    pub r: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    pub t: Vec<f64>,
    /// Initial observable; defaults to `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<RawMatrix>,
    /// RK4 steps; defaults to `max(⌈1000 t⌉, 100)` per time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicateConfig {
    /// Initial stock price; defaults to `X` when the model is scalar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Strike; defaults to `K` when the model is scalar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strike: Option<f64>,
    #[serde(default = "one")]
    pub volatility: f64,
    pub steps: usize,
    pub paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// A config whose model and state passed every construction check.
#[derive(Debug, Clone)]
pub struct Validated {
    pub raw: RunConfig,
    pub model: MarketModel,
    pub state: Option<UnitVector>,
}

fn at(path: impl Into<String>) -> impl FnOnce(qbs_core::QbsError) -> CliError {
    let path = path.into();
    move |source| CliError::Field { path, source }
}

pub(crate) fn complex_matrix(path: &str, raw: &RawMatrix) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<Complex64>> = raw
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(at(path))
}

pub(crate) fn hermitian(path: &str, raw: &RawMatrix) -> Result<HermitianMatrix, CliError> {
    HermitianMatrix::new(complex_matrix(path, raw)?).map_err(at(path))
}

fn unitary(path: &str, raw: &RawMatrix) -> Result<UnitaryMatrix, CliError> {
    UnitaryMatrix::new(complex_matrix(path, raw)?).map_err(at(path))
}

/// Inverse of the matrix parsing, for writing configs back out.
pub fn raw_matrix(m: &ComplexMatrix) -> RawMatrix {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn parse_config(text: &str) -> Result<Validated, CliError> {
    let raw: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Syntax(e.to_string()))?;
    raw.validate()
}

impl RunConfig {
    pub fn validate(self) -> Result<Validated, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        let m = &self.model;
        let ops = ModelOperators::new(
            hermitian("model.ops.X", &m.ops.x)?,
            hermitian("model.ops.H", &m.ops.h)?,
            complex_matrix("model.ops.L", &m.ops.l)?,
            unitary("model.ops.S", &m.ops.s)?,
        )
        .map_err(at("model.ops"))?;
        let strike = match &m.strike {
            StrikeConfig::Scalar(k) => {
                if !(*k > 0.0 && k.is_finite()) {
                    return Err(CliError::Config(format!("model.K: must be > 0, got {k}")));
                }
                HermitianMatrix::scalar(ops.dim(), *k)
            }
            StrikeConfig::Matrix(raw) => hermitian("model.K", raw)?,
        };
        let model = MarketModel::new(ops, strike, m.r, m.maturity, m.beta0).map_err(at("model"))?;

        let state = match &self.state {
            None => None,
            Some(v) => {
                let u = UnitVector::new(v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    .map_err(at("state"))?;
                if u.dim() != model.dim() {
                    return Err(CliError::Config(format!(
                        "state: dimension {} does not match model dimension {}",
                        u.dim(),
                        model.dim()
                    )));
                }
                Some(u)
            }
        };

        self.check_sections(&model)?;
        for (name, value) in &self.tolerances {
            crate::tolerances::check_override(name, *value)?;
        }
        Ok(Validated {
            raw: self,
            model,
            state,
        })
    }

    fn check_sections(&self, model: &MarketModel) -> Result<(), CliError> {
        let d = model.dim();
        let nonempty = |path: &str, len: usize| {
            if len == 0 {
                Err(CliError::Config(format!("{path}: grid is empty")))
            } else {
                Ok(())
            }
        };
        let square_of_dim = |path: String, raw: &RawMatrix| -> Result<(), CliError> {
            let m = hermitian(&path, raw)?;
            if m.dim() != d {
                return Err(CliError::Config(format!(
                    "{path}: dimension {} does not match model dimension {d}",
                    m.dim()
                )));
            }
            Ok(())
        };
        if let Some(g) = &self.grid {
            nonempty("grid.t", g.t.len())?;
            if let Some(zs) = &g.z {
                nonempty("grid.z", zs.len())?;
                for (i, z) in zs.iter().enumerate() {
                    square_of_dim(format!("grid.z[{i}]"), z)?;
                }
            }
        }
        if let Some(i) = &self.ito {
            nonempty("ito.dims", i.dims.len())?;
        }
        if let Some(term) = &self.terminal {
            if let Some(zs) = &term.z {
                nonempty("terminal.z", zs.len())?;
                for (i, z) in zs.iter().enumerate() {
                    square_of_dim(format!("terminal.z[{i}]"), z)?;
                }
            }
        }
        if let Some(h) = &self.hedge {
            nonempty("hedge.t", h.t.len())?;
            if let Some(j) = &h.j_x {
                square_of_dim("hedge.j_x".into(), j)?;
            }
        }
        if let Some(c) = &self.classical {
            nonempty("classical", c.len())?;
        }
        if let Some(l) = &self.lindblad {
            nonempty("lindblad.t", l.t.len())?;
            if let Some(x0) = &l.x0 {
                square_of_dim("lindblad.x0".into(), x0)?;
            }
        }
        Ok(())
    }
}
