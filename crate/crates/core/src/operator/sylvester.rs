//! Construction of a coupling `L` with `[X, L] = W X`.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use super::spectral::spectral_decompose;
use crate::error::{QbsError, Result};
use crate::tolerance;

/// Solves `[X, L] = W X` for `L`.
///
/// In the eigenbasis of `X = diag(λ)` the equation reads
/// `(λ_i − λ_j) L_ij = W_ij λ_j`, so the off-diagonal entries are fixed and
/// the diagonal of `W` must vanish. The free diagonal of `L` is set to zero.
/// Any such `L` satisfies `[L*, X][X, L] = X²`.
pub fn sylvester_l(x: &HermitianMatrix, w: &UnitaryMatrix) -> Result<ComplexMatrix> {
    if x.dim() != w.dim() {
        return Err(QbsError::DimensionMismatch {
            left: x.dim(),
            right: w.dim(),
        });
    }
    let spec = spectral_decompose(x)?;
    let lam = &spec.eigenvalues;
    let scale = spec.spectral_radius().max(1.0);
    let tol = tolerance::SYLVESTER * scale;

    for (index, &eigenvalue) in lam.iter().enumerate() {
        if eigenvalue.abs() <= tol {
            return Err(QbsError::ZeroEigenvalue { index, eigenvalue });
        }
    }
    for index in 0..lam.len().saturating_sub(1) {
        let gap = lam[index + 1] - lam[index];
        if gap <= tol {
            return Err(QbsError::RepeatedEigenvalue { index, gap });
        }
    }

    let basis = spec.eigenbasis();
    let w_eig = basis.conjugate(w.matrix())?;
    for index in 0..lam.len() {
        let magnitude = w_eig.get(index, index).norm();
        if magnitude > tolerance::SYLVESTER {
            return Err(QbsError::NonzeroDiagonal { index, magnitude });
        }
    }

    let n = lam.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(0.0, 0.0)
                    } else {
                        w_eig.get(i, j) * (lam[j] / (lam[i] - lam[j]))
                    }
                })
                .collect()
        })
        .collect();
    let l_eig = ComplexMatrix::from_rows(&rows)?;
    basis.adjoint().conjugate(&l_eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::commutator;

    fn check_identities(x: &HermitianMatrix, w: &UnitaryMatrix, l: &ComplexMatrix) {
        let xl = commutator(x.matrix(), l).unwrap();
        let wx = w.matrix() * x.matrix();
        assert!(xl.relative_distance(&wx).unwrap() < 1e-12);
        let lsx = commutator(&l.adjoint(), x.matrix()).unwrap();
        let x2 = x.matrix() * x.matrix();
        assert!((&lsx * &xl).relative_distance(&x2).unwrap() < 1e-12);
    }

    #[test]
    fn two_by_two_example() {
        let x = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]);
        let w = UnitaryMatrix::new(
            ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        )
        .unwrap();
        let l = sylvester_l(&x, &w).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![0.0, -2.0], vec![1.0, 0.0]]).unwrap();
        assert!((&l - &expected).norm_fro() < 1e-15);
        check_identities(&x, &w, &l);
    }

    #[test]
    fn identity_w_is_rejected() {
        let x = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]);
        let err = sylvester_l(&x, &UnitaryMatrix::identity(2)).unwrap_err();
        assert_eq!(
            err,
            QbsError::NonzeroDiagonal {
                index: 0,
                magnitude: 1.0
            }
        );
    }

    #[test]
    fn cyclic_three_by_three() {
        let x = HermitianMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        let w = UnitaryMatrix::cyclic_shift(3);
        let l = sylvester_l(&x, &w).unwrap();
        // Shift has W_{i+1,i} = 1, so L_{i+1,i} = λ_i / (λ_{i+1} − λ_i).
        let expected = ComplexMatrix::from_real_rows(&[
            vec![0.0, 0.0, 3.0 / (1.0 - 3.0)],
            vec![1.0 / (2.0 - 1.0), 0.0, 0.0],
            vec![0.0, 2.0 / (3.0 - 2.0), 0.0],
        ])
        .unwrap();
        assert!((&l - &expected).norm_fro() < 1e-14);
        check_identities(&x, &w, &l);
    }

    #[test]
    fn degenerate_spectrum_is_rejected() {
        let w = UnitaryMatrix::cyclic_shift(3);
        let repeated = HermitianMatrix::from_real_diagonal(&[1.0, 2.0, 2.0]);
        assert!(matches!(
            sylvester_l(&repeated, &w),
            Err(QbsError::RepeatedEigenvalue { index: 1, .. })
        ));
        let singular = HermitianMatrix::from_real_diagonal(&[-1.0, 0.0, 2.0]);
        assert!(matches!(
            sylvester_l(&singular, &w),
            Err(QbsError::ZeroEigenvalue { index: 1, .. })
        ));
    }
}
