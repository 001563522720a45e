use proptest::prelude::*;
use qbs_core::ito::UnitVector;
use qbs_core::ito::{
    flow_coefficients, ito_product, semigroup_evolve, ModelOperators, QuantumStochasticDifferential,
};
use qbs_core::operator::{
    apply_scalar_function, commutator, normal_cdf, operator_exp, operator_log, positive_part,
    sylvester_l, ComplexMatrix, HermitianMatrix, UnitaryMatrix,
};
use qbs_core::pricing::{
    hedge_portfolio, spectral_payoff, terminal_payoff, unit_price, DeltaConvention, MarketModel,
    Payoff, PayoffConvention,
};
use qbs_core::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.distance(b).unwrap() / b.norm_fro().max(1.0)
}

fn random_qsd(dim: usize, r: &mut ChaCha8Rng) -> QuantumStochasticDifferential {
    QuantumStochasticDifferential::new(
        random::ginibre(dim, r),
        random::ginibre(dim, r),
        random::ginibre(dim, r),
        random::ginibre(dim, r),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_calculus_is_unitarily_equivariant(seed in any::<u64>(), dim in 1usize..7) {
        let mut r = rng(seed);
        let a = random::hermitian(dim, &mut r);
        let u = random::unitary(dim, &mut r);
        let rotated = HermitianMatrix::new(u.conjugate(a.matrix()).unwrap().hermitian_part()).unwrap();
        let f = |x: f64| (0.3 * x).sin() + x * x;
        let lhs = apply_scalar_function(&rotated, f).unwrap();
        let rhs = u.conjugate(apply_scalar_function(&a, f).unwrap().matrix()).unwrap();
        prop_assert!(rel(lhs.matrix(), &rhs) < 1e-12);
    }

    #[test]
    fn log_inverts_exp(seed in any::<u64>(), dim in 1usize..9) {
        let mut r = rng(seed);
        let a = random::hermitian(dim, &mut r);
        let back = operator_log(&operator_exp(&a).unwrap()).unwrap();
        prop_assert!(rel(back.matrix(), a.matrix()) < 1e-11);
    }

    #[test]
    fn positive_part_splits_the_operator(seed in any::<u64>(), dim in 1usize..9) {
        let mut r = rng(seed);
        let a = random::hermitian(dim, &mut r);
        let split = positive_part(&a).unwrap().try_sub(&positive_part(&a.neg()).unwrap()).unwrap();
        prop_assert!(rel(split.matrix(), a.matrix()) < 1e-12);
    }

    #[test]
    fn normal_cdf_is_symmetric(x in -30.0f64..30.0) {
        prop_assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn ito_product_is_bilinear_and_associative(seed in any::<u64>(), dim in 1usize..5, c in -3.0f64..3.0) {
        let mut r = rng(seed);
        let (a, b, d) = (random_qsd(dim, &mut r), random_qsd(dim, &mut r), random_qsd(dim, &mut r));
        let left = ito_product(&(&a.scale(c) + &b), &d).unwrap();
        let split = &ito_product(&a, &d).unwrap().scale(c) + &ito_product(&b, &d).unwrap();
        prop_assert!(left.max_relative_distance(&split).unwrap() < 1e-12);
        let ab_d = ito_product(&ito_product(&a, &b).unwrap(), &d).unwrap();
        let a_bd = ito_product(&a, &ito_product(&b, &d).unwrap()).unwrap();
        prop_assert!(ab_d.max_relative_distance(&a_bd).unwrap() < 1e-12);
    }

    #[test]
    fn flow_coefficients_are_linear_in_x(seed in any::<u64>(), dim in 1usize..6, c in -3.0f64..3.0) {
        let mut r = rng(seed);
        let m = random::model(dim, &mut r);
        let y = random::hermitian(dim, &mut r);
        let sum = m.x.scale(c).try_add(&y).unwrap();
        let f = flow_coefficients(&sum, &m).unwrap();
        let fx = flow_coefficients(&m.x, &m).unwrap();
        let fy = flow_coefficients(&y, &m).unwrap();
        prop_assert!(rel(&f.alpha, &(&fx.alpha.scale(c) + &fy.alpha)) < 1e-12);
        prop_assert!(rel(&f.lambda, &(&fx.lambda.scale(c) + &fy.lambda)) < 1e-12);
        prop_assert!(rel(&f.theta, &(&fx.theta.scale(c) + &fy.theta)) < 1e-12);
        prop_assert!(fx.structure_defect() < 1e-12);
    }

    #[test]
    fn sylvester_identities(seed in any::<u64>(), dim in 2usize..8) {
        let mut r = rng(seed);
        let (x, w) = random::sylvester_pair(dim, &mut r);
        let l = sylvester_l(&x, &w).unwrap();
        let xl = commutator(x.matrix(), &l).unwrap();
        prop_assert!(rel(&xl, &(w.matrix() * x.matrix())) < 1e-10);
        let lsx = commutator(&l.adjoint(), x.matrix()).unwrap();
        prop_assert!(rel(&(&lsx * &xl), &(x.matrix() * x.matrix())) < 1e-10);
    }

    #[test]
    fn semigroup_is_unital(seed in any::<u64>(), dim in 1usize..5, t in 0.0f64..1.0) {
        let mut r = rng(seed);
        let m = random::model(dim, &mut r);
        let id = HermitianMatrix::identity(dim);
        let out = semigroup_evolve(&id, &m, t, 200).unwrap();
        prop_assert!(out.matrix().distance(id.matrix()).unwrap() < 1e-9);
    }

    #[test]
    fn scalar_price_is_monotone(z in -2.0f64..2.0, t in 0.05f64..2.0, r in 0.0f64..0.1, dz in 0.0f64..0.5, dt in 0.0f64..0.5) {
        let base = unit_price(t, z, r);
        prop_assert!(unit_price(t, z + dz, r) >= base - 1e-15);
        prop_assert!(unit_price(t + dt, z, r) >= base - 1e-15);
    }

    #[test]
    fn hedge_reconstructs_value(seed in any::<u64>(), dim in 1usize..6, frac in 0.05f64..0.95) {
        let mut r = rng(seed);
        let u = random::unitary(dim, &mut r);
        let rot = |d: &[f64]| HermitianMatrix::new(
            u.adjoint().conjugate(&ComplexMatrix::from_real_diagonal(d)).unwrap().hermitian_part(),
        ).unwrap();
        let x: Vec<f64> = (0..dim).map(|i| 0.5 + 0.4 * i as f64).collect();
        let k: Vec<f64> = (0..dim).map(|i| 1.5 - 0.1 * i as f64).collect();
        let ops = ModelOperators::new(rot(&x), HermitianMatrix::zeros(dim), ComplexMatrix::zeros(dim), UnitaryMatrix::identity(dim)).unwrap();
        let model = MarketModel::new(ops, rot(&k), 0.04, 1.5, 0.9).unwrap();
        let jx: Vec<f64> = x.iter().map(|v| v * 1.1).collect();
        let jx = rot(&jx);
        for conv in [DeltaConvention::LogMoneyness, DeltaConvention::Classical] {
            let pos = hedge_portfolio(frac * 1.5, &jx, &model, conv).unwrap();
            prop_assert!(pos.reconstruction_defect(&jx).unwrap() < 1e-12);
        }
    }

    #[test]
    fn payoff_conventions_agree_when_sign_definite(seed in any::<u64>(), dim in 1usize..6, positive in any::<bool>()) {
        let mut r = rng(seed);
        let sign = if positive { 1.0 } else { -1.0 };
        let spec: Vec<f64> = (0..dim).map(|i| sign * (0.2 + 0.3 * i as f64)).collect();
        let z = random::with_spectrum(&spec, &mut r);
        let k = HermitianMatrix::scalar(dim, 1.3);
        let state = UnitVector::new(random::unit_vector(dim, &mut r)).unwrap();
        let op = spectral_payoff(&z, &k).unwrap();
        let spectral = qbs_core::ito::expectation(&state, op.matrix()).unwrap().re;
        let Payoff::Scalar(expect) = terminal_payoff(&z, &k, PayoffConvention::Expectation(&state)).unwrap() else {
            panic!("expectation convention yields a scalar");
        };
        prop_assert!((spectral - expect).abs() < 1e-12);
    }
}
