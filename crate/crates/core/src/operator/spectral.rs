//! Hermitian eigendecomposition and the spectral functional calculus built on it.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use super::normal::normal_cdf;
use crate::error::{QbsError, Result};

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 10_000;

/// `M = V diag(Λ) V*` with ascending real eigenvalues and orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(d) V*` for arbitrary complex weights `d`.
    pub fn synthesize_complex(&self, weights: &[Complex64]) -> ComplexMatrix {
        let v = self.eigenvectors.as_inner();
        let mut scaled = v.clone();
        for (j, w) in weights.iter().enumerate() {
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= w;
            }
        }
        ComplexMatrix::from_inner(scaled * v.adjoint())
    }

    /// `V diag(d) V*` for real weights; Hermitian by construction.
    pub fn synthesize(&self, weights: &[f64]) -> HermitianMatrix {
        let weights: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        HermitianMatrix::symmetrized(&self.synthesize_complex(&weights))
    }

    /// Applies `f` eigenvalue-wise. Fails if `f` is non-finite anywhere on the spectrum.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let mut weights = Vec::with_capacity(self.dim());
        for &eigenvalue in &self.eigenvalues {
            let y = f(eigenvalue);
            if !y.is_finite() {
                return Err(QbsError::FunctionDomain { eigenvalue });
            }
            weights.push(y);
        }
        Ok(self.synthesize(&weights))
    }

    /// `‖V diag(Λ) V* − M‖_F`.
    pub fn reconstruction_error(&self, m: &HermitianMatrix) -> f64 {
        let rec = self.synthesize(&self.eigenvalues);
        (rec.matrix() - m.matrix()).norm_fro()
    }

    /// `‖V*V − I‖_F`.
    pub fn orthonormality_error(&self) -> f64 {
        self.eigenvectors.unitary_defect()
    }

    pub fn eigenbasis(&self) -> UnitaryMatrix {
        UnitaryMatrix::from_trusted(self.eigenvectors.clone())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Largest eigenvalue modulus, i.e. the operator norm.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn input_hash(m: &DMatrix<Complex64>) -> u64 {
    let mut h = DefaultHasher::new();
    m.nrows().hash(&mut h);
    for z in m.iter() {
        z.re.to_bits().hash(&mut h);
        z.im.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out ascending. Each eigenvector is rotated so that its
/// largest-modulus component (first one on ties) is real and positive, which
/// makes the output reproducible for golden tests.
pub fn spectral_decompose(m: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let inner = m.matrix().as_inner().clone();
    let n = inner.nrows();
    let hash = input_hash(&inner);
    let eig = SymmetricEigen::try_new(inner, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(QbsError::EigenNonConvergence { hash })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(QbsError::EigenNonConvergence { hash });
    }
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..n {
            let a = col[i].norm();
            if a > best {
                best = a;
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            col[pivot].conj() / best
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            vectors[(i, dst)] = col[i] * phase;
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_inner(vectors),
    })
}

/// `f(M) = V diag(f(Λ)) V*`.
pub fn apply_scalar_function(
    m: &HermitianMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    spectral_decompose(m)?.apply(f)
}

/// Self-adjoint logarithm of a positive-definite operator.
pub fn operator_log(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = spectral_decompose(h)?;
    if let Some((index, &eigenvalue)) = spec.eigenvalues.iter().enumerate().find(|(_, &x)| x <= 0.0)
    {
        return Err(QbsError::NotPositive { index, eigenvalue });
    }
    spec.apply(f64::ln)
}

pub fn operator_exp(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_scalar_function(a, f64::exp)
}

/// Spectral positive part, `x ↦ max(0, x)`.
pub fn positive_part(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_scalar_function(m, |x| x.max(0.0))
}

/// Standard normal CDF applied spectrally.
pub fn phi_operator(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_scalar_function(m, normal_cdf)
}

/// `exp(i t H)`, unitary for Hermitian `H`.
pub fn unitary_exp(h: &HermitianMatrix, t: f64) -> Result<UnitaryMatrix> {
    let spec = spectral_decompose(h)?;
    let phases: Vec<Complex64> = spec
        .eigenvalues
        .iter()
        .map(|&x| Complex64::from_polar(1.0, x * t))
        .collect();
    Ok(UnitaryMatrix::from_trusted(
        spec.synthesize_complex(&phases),
    ))
}

/// Checks `‖[A, B]‖_F ≤ tol · ‖A‖_F · ‖B‖_F`.
pub fn check_commuting(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<f64> {
    let defect = super::matrix::commutator(a.matrix(), b.matrix())?.norm_fro();
    if defect > tol * a.matrix().norm_fro() * b.matrix().norm_fro() {
        return Err(QbsError::NonCommuting { defect });
    }
    Ok(defect)
}
