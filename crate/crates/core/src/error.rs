use thiserror::Error;

/// Errors raised by the operator calculus, the Itô algebra and the pricer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QbsError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have at least one row")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not the identity (defect {defect:.3e})")]
    NotIdentity { defect: f64 },

    #[error("eigensolver did not converge (input hash {hash:016x})")]
    EigenNonConvergence { hash: u64 },

    #[error("function is undefined or non-finite at eigenvalue {eigenvalue}")]
    FunctionDomain { eigenvalue: f64 },

    #[error("operator is not positive definite: eigenvalue {eigenvalue} at index {index}")]
    NotPositive { index: usize, eigenvalue: f64 },

    #[error("eigenvalue {index} is zero ({eigenvalue})")]
    ZeroEigenvalue { index: usize, eigenvalue: f64 },

    #[error("eigenvalues {index} and {} coincide (gap {gap:.3e})", index + 1)]
    RepeatedEigenvalue { index: usize, gap: f64 },

    #[error(
        "unitary has nonzero diagonal entry {index} in the eigenbasis (|w| = {magnitude:.3e})"
    )]
    NonzeroDiagonal { index: usize, magnitude: f64 },

    #[error("operators do not commute (defect {defect:.3e})")]
    NonCommuting { defect: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("spectrum point {eigenvalue} lies within {delta} of zero")]
    SpectrumNearZero { eigenvalue: f64, delta: f64 },

    #[error("numerical drift: {what} (defect {defect:.3e})")]
    NumericalDrift { what: &'static str, defect: f64 },

    #[error("invalid {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
}

impl QbsError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        QbsError::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = QbsError> = std::result::Result<T, E>;
