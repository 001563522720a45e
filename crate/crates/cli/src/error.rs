use qbs_core::QbsError;
use thiserror::Error;

/// Exit code on success.
pub const EXIT_OK: u8 = 0;
/// Runtime failure not attributable to the input.
pub const EXIT_RUNTIME: u8 = 1;
/// Usage, syntax, configuration or precondition error.
pub const EXIT_CONFIG: u8 = 2;
/// The run completed but a checked invariant failed.
pub const EXIT_INVARIANT: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },

    #[error("config syntax: {0}")]
    Syntax(String),

    #[error("config: {0}")]
    Config(String),

    #[error("config: {path}: {source}")]
    Field { path: String, source: QbsError },

    #[error("{context}: {source}")]
    Compute { context: String, source: QbsError },

    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute {
                source: QbsError::NumericalDrift { .. } | QbsError::EigenNonConvergence { .. },
                ..
            } => EXIT_RUNTIME,
            CliError::Output(_) => EXIT_RUNTIME,
            _ => EXIT_CONFIG,
        }
    }
}

pub(crate) fn compute(context: impl Into<String>) -> impl FnOnce(QbsError) -> CliError {
    let context = context.into();
    move |source| CliError::Compute { context, source }
}
