//! Vacuum-expectation dynamics: the quantum dynamical semigroup generated by `θ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::flow::{generator_apply, ModelOperators};
use crate::error::{QbsError, Result};
use crate::operator::{ComplexMatrix, HermitianMatrix};
use crate::tolerance;

/// `θ(X) = i[H,X] − ½(L*L X + X L*L − 2 L* X L)`.
pub fn lindblad_generator(x: &HermitianMatrix, m: &ModelOperators) -> Result<ComplexMatrix> {
    if x.dim() != m.dim() {
        return Err(QbsError::DimensionMismatch {
            left: x.dim(),
            right: m.dim(),
        });
    }
    Ok(generator_apply(x.matrix(), m))
}

/// Default step count: `max(⌈1000 t⌉, 100)`.
pub fn default_steps(t: f64) -> usize {
    ((1000.0 * t).ceil() as usize).max(100)
}

/// Integrates `dX/dt = θ(X)` from `X0` over `[0, t]` with classical RK4.
pub fn semigroup_evolve(
    x0: &HermitianMatrix,
    m: &ModelOperators,
    t: f64,
    steps: usize,
) -> Result<HermitianMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(QbsError::invalid(
            "t",
            format!("must be finite and >= 0, got {t}"),
        ));
    }
    if steps == 0 {
        return Err(QbsError::invalid("steps", "must be >= 1"));
    }
    if x0.dim() != m.dim() {
        return Err(QbsError::DimensionMismatch {
            left: x0.dim(),
            right: m.dim(),
        });
    }
    let h = t / steps as f64;
    let mut x = x0.matrix().clone();
    for _ in 0..steps {
        let k1 = generator_apply(&x, m);
        let k2 = generator_apply(&(&x + &k1.scale(0.5 * h)), m);
        let k3 = generator_apply(&(&x + &k2.scale(0.5 * h)), m);
        let k4 = generator_apply(&(&x + &k3.scale(h)), m);
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
        x = &x + &incr.scale(h / 6.0);
    }
    let defect = x.hermitian_defect();
    if defect > tolerance::SEMIGROUP_HERMITIAN * x.norm_fro().max(1.0) {
        return Err(QbsError::NumericalDrift {
            what: "evolved observable lost Hermiticity",
            defect,
        });
    }
    HermitianMatrix::new(x.hermitian_part())
}

/// Matrix of `X ↦ θ(X)` acting on column-stacked `vec(X)`.
///
/// Uses `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
pub fn generator_superoperator(m: &ModelOperators) -> DMatrix<Complex64> {
    let n = m.dim();
    let id = DMatrix::<Complex64>::identity(n, n);
    let h = m.h.matrix().as_inner();
    let l = m.l.as_inner();
    let ls = l.adjoint();
    let lsl = &ls * l;
    let i = Complex64::new(0.0, 1.0);
    let half = Complex64::new(0.5, 0.0);

    let mut g = id.kronecker(&(h * i));
    g -= h.transpose().kronecker(&id) * i;
    g -= id.kronecker(&lsl) * half;
    g -= lsl.transpose().kronecker(&id) * half;
    g += l.transpose().kronecker(&ls);
    g
}

fn vec_of(x: &ComplexMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(x.as_inner().as_slice())
}

fn unvec(v: &DVector<Complex64>, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_inner(DMatrix::from_column_slice(n, n, v.as_slice()))
}

/// `exp(t·G) vec(X0)` with the full `d² × d²` superoperator.
pub fn evolve_superoperator(
    x0: &HermitianMatrix,
    m: &ModelOperators,
    t: f64,
) -> Result<ComplexMatrix> {
    if x0.dim() != m.dim() {
        return Err(QbsError::DimensionMismatch {
            left: x0.dim(),
            right: m.dim(),
        });
    }
    let g = generator_superoperator(m) * Complex64::new(t, 0.0);
    let prop = g.exp();
    Ok(unvec(&(prop * vec_of(x0.matrix())), m.dim()))
}

/// A normalized system state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<Complex64>);

impl UnitVector {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(QbsError::Empty);
        }
        let norm = components.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tolerance::STATE_NORM {
            return Err(QbsError::NotNormalized { norm });
        }
        Ok(Self(components))
    }

    /// Basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[index] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }
}

/// `⟨u, M u⟩`.
pub fn expectation(state: &UnitVector, m: &ComplexMatrix) -> Result<Complex64> {
    if state.dim() != m.dim() {
        return Err(QbsError::DimensionMismatch {
            left: state.dim(),
            right: m.dim(),
        });
    }
    let u = DVector::from_column_slice(state.components());
    Ok(u.dotc(&(m.as_inner() * &u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ito::flow_coefficients;
    use crate::operator::unitary_exp;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = random::model(3, &mut rng);
        let at_identity = lindblad_generator(&HermitianMatrix::identity(3), &m).unwrap();
        assert!(at_identity.norm_max() <= 1e-14);

        let theta = lindblad_generator(&m.x, &m).unwrap();
        assert_eq!(theta, flow_coefficients(&m.x, &m).unwrap().theta);
        assert!(theta.hermitian_defect() < 1e-13);

        let mut closed = m.clone();
        closed.l = ComplexMatrix::zeros(3);
        let theta = lindblad_generator(&closed.x, &closed).unwrap();
        let expected = crate::operator::commutator(closed.h.matrix(), closed.x.matrix())
            .unwrap()
            .scale_complex(Complex64::new(0.0, 1.0));
        assert!(theta.distance(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn superoperator_matches_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let m = random::model(3, &mut rng);
        let x = random::hermitian(3, &mut rng);
        let g = generator_superoperator(&m);
        let via_super = unvec(&(g * vec_of(x.matrix())), 3);
        let direct = lindblad_generator(&x, &m).unwrap();
        assert!(via_super.distance(&direct).unwrap() < 1e-13);
    }

    #[test]
    fn identity_is_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = random::model(3, &mut rng);
        let out = semigroup_evolve(&HermitianMatrix::identity(3), &m, 1.3, 200).unwrap();
        assert!((out.matrix() - &ComplexMatrix::identity(3)).norm_fro() < 1e-12);
    }

    #[test]
    fn closed_system_is_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut m = random::model(3, &mut rng);
        m.l = ComplexMatrix::zeros(3);
        let t = 0.9;
        let out = semigroup_evolve(&m.x, &m, t, default_steps(t)).unwrap();
        let u = unitary_exp(&m.h, t).unwrap();
        // e^{iHt} X e^{−iHt} = U X U* with U = e^{iHt}.
        let expected = u.adjoint().conjugate(m.x.matrix()).unwrap();
        assert!((out.matrix() - &expected).norm_fro() < 1e-9);
    }

    #[test]
    fn rk4_matches_superoperator_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let m = random::model(3, &mut rng);
        let t = 0.7;
        let rk = semigroup_evolve(&m.x, &m, t, default_steps(t)).unwrap();
        let exact = evolve_superoperator(&m.x, &m, t).unwrap();
        assert!((rk.matrix() - &exact).norm_fro() < 1e-8);
    }

    #[test]
    fn evolve_argument_errors() {
        let m = ModelOperators::truncated_shift(2);
        assert!(semigroup_evolve(&m.x, &m, -1.0, 10).is_err());
        assert!(semigroup_evolve(&m.x, &m, 1.0, 0).is_err());
        assert_eq!(default_steps(0.01), 100);
        assert_eq!(default_steps(0.7), 700);
    }

    #[test]
    fn expectation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let u = UnitVector::new(random::unit_vector(4, &mut rng)).unwrap();
        let one = expectation(&u, &ComplexMatrix::identity(4)).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let e1 = UnitVector::basis(2, 0);
        let v = expectation(&e1, &ComplexMatrix::from_real_diagonal(&[3.0, 5.0])).unwrap();
        assert_eq!(v, Complex64::new(3.0, 0.0));

        let m = random::hermitian(4, &mut rng);
        let got = expectation(&u, m.matrix()).unwrap();
        let c = u.components();
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                sum += c[i].conj() * m.matrix().get(i, j) * c[j];
            }
        }
        assert!((got - sum).norm() < 1e-14);
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn state_must_be_normalized() {
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(
            UnitVector::new(v),
            Err(QbsError::NotNormalized { .. })
        ));
        let u = UnitVector::basis(3, 1);
        assert!(expectation(&u, &ComplexMatrix::identity(2)).is_err());
    }
}
