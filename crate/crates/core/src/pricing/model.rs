use serde::Serialize;

use crate::error::{QbsError, Result};
use crate::ito::ModelOperators;
use crate::operator::{check_commuting, spectral_decompose, HermitianMatrix};
use crate::tolerance;

/// Quantum market: system operators, strike operator `K`, bond rate `r`,
/// maturity `T` and initial bond value `β0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel {
    pub ops: ModelOperators,
    pub strike: HermitianMatrix,
    pub rate: f64,
    pub maturity: f64,
    pub beta0: f64,
}

pub(crate) fn require_positive_definite(m: &HermitianMatrix) -> Result<()> {
    let spec = spectral_decompose(m)?;
    if let Some((index, &eigenvalue)) = spec.eigenvalues.iter().enumerate().find(|(_, &x)| x <= 0.0)
    {
        return Err(QbsError::NotPositive { index, eigenvalue });
    }
    Ok(())
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(QbsError::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ));
    }
    Ok(())
}

impl MarketModel {
    /// Validates `X > 0`, `K > 0`, `[X, K] ≈ 0`, `r ≥ 0`, `T > 0`, `β0 > 0`.
    pub fn new(
        ops: ModelOperators,
        strike: HermitianMatrix,
        rate: f64,
        maturity: f64,
        beta0: f64,
    ) -> Result<Self> {
        if strike.dim() != ops.dim() {
            return Err(QbsError::DimensionMismatch {
                left: ops.dim(),
                right: strike.dim(),
            });
        }
        require_positive_definite(&ops.x)?;
        require_positive_definite(&strike)?;
        check_commuting(&ops.x, &strike, tolerance::COMMUTATION)?;
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(QbsError::invalid(
                "r",
                format!("must be finite and >= 0, got {rate}"),
            ));
        }
        require_positive("T", maturity)?;
        require_positive("beta0", beta0)?;
        Ok(Self {
            ops,
            strike,
            rate,
            maturity,
            beta0,
        })
    }

    /// `K = k·I`.
    pub fn with_scalar_strike(
        ops: ModelOperators,
        strike: f64,
        rate: f64,
        maturity: f64,
        beta0: f64,
    ) -> Result<Self> {
        require_positive("K", strike)?;
        let k = HermitianMatrix::scalar(ops.dim(), strike);
        Self::new(ops, k, rate, maturity, beta0)
    }

    pub fn dim(&self) -> usize {
        self.ops.dim()
    }

    /// `β_t = β0 e^{rt}`.
    pub fn bond(&self, t: f64) -> f64 {
        self.beta0 * (self.rate * t).exp()
    }
}

/// `ω(t, z)` and, when a state was supplied, `⟨u, ω u⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceQuote {
    pub t: f64,
    pub z: HermitianMatrix,
    pub omega: HermitianMatrix,
    pub omega_expectation: Option<f64>,
}

/// Scalar verdict of a residual or limit check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residual_norm: f64,
    pub tolerance: f64,
    /// `(t, spectral point)` pairs the residual was evaluated on.
    pub grid: Vec<(f64, f64)>,
    pub passed: bool,
}

impl ResidualReport {
    pub fn new(residual_norm: f64, tolerance: f64, grid: Vec<(f64, f64)>) -> Self {
        Self {
            residual_norm,
            tolerance,
            grid,
            passed: residual_norm <= tolerance,
        }
    }

    /// Re-evaluates the verdict against another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.residual_norm <= tolerance;
        self
    }

    /// Worst-case combination of several reports at a common tolerance.
    pub fn merge(reports: impl IntoIterator<Item = ResidualReport>, tolerance: f64) -> Self {
        let mut norm: f64 = 0.0;
        let mut grid = Vec::new();
        for r in reports {
            norm = norm.max(r.residual_norm);
            grid.extend(r.grid);
        }
        Self::new(norm, tolerance, grid)
    }
}
