//! Random operators and models for property checks and the CLI self-tests.
//!
//! All samplers draw from a caller-supplied RNG, so a fixed seed gives a
//! fixed sequence of models.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ito::ModelOperators;
use crate::operator::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(gaussian(rng) * scale, gaussian(rng) * scale)
    });
    ComplexMatrix::from_inner(m)
}

/// GUE-like Hermitian matrix `(G + G*)/2`.
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::symmetrized(&ginibre(dim, rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    let qr = ginibre(dim, rng).into_inner().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::from_trusted(ComplexMatrix::from_inner(q))
}

/// `U diag(λ) U*` with a Haar `U`.
pub fn with_spectrum<R: Rng + ?Sized>(eigenvalues: &[f64], rng: &mut R) -> HermitianMatrix {
    let u = unitary(eigenvalues.len(), rng);
    let d = ComplexMatrix::from_real_diagonal(eigenvalues);
    let m = u.adjoint().conjugate(&d).expect("dims agree");
    HermitianMatrix::symmetrized(&m)
}

/// Positive-definite matrix with spectrum drawn uniformly from `[lo, hi]`.
pub fn positive_definite<R: Rng + ?Sized>(
    dim: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> HermitianMatrix {
    let eig: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
    with_spectrum(&eig, rng)
}

/// Random `(X, H, L, S)` with Gaussian entries and Haar scattering.
pub fn model<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ModelOperators {
    let x = hermitian(dim, rng);
    let h = hermitian(dim, rng);
    let l = ginibre(dim, rng);
    let s = unitary(dim, rng);
    ModelOperators::new(x, h, l, s).expect("dims agree")
}

/// Random model with `S = I` (quantum Brownian case).
pub fn brownian_model<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ModelOperators {
    let x = hermitian(dim, rng);
    let h = hermitian(dim, rng);
    let l = ginibre(dim, rng);
    ModelOperators::new(x, h, l, UnitaryMatrix::identity(dim)).expect("dims agree")
}

/// Unit vector drawn uniformly from the complex sphere.
pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// A pair `(X, W)` admissible for [`crate::operator::sylvester_l`].
///
/// `X` has well-separated nonzero eigenvalues; `W`, written in the eigenbasis
/// of `X`, is a phased derangement and so has zero diagonal.
pub fn sylvester_pair<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> (HermitianMatrix, UnitaryMatrix) {
    assert!(dim >= 2, "a zero-diagonal unitary needs dim >= 2");
    let mut eig: Vec<f64> = Vec::with_capacity(dim);
    let mut level = rng.random_range(-3.0..-1.0);
    for _ in 0..dim {
        eig.push(level);
        level += rng.random_range(0.3..1.5);
    }
    // Nudge the spectrum off zero.
    for x in eig.iter_mut() {
        if x.abs() < 0.2 {
            *x += if *x >= 0.0 { 0.2 } else { -0.2 };
        }
    }
    eig.sort_by(f64::total_cmp);

    let basis = unitary(dim, rng);
    let x_diag = ComplexMatrix::from_real_diagonal(&eig);
    let x = HermitianMatrix::symmetrized(&basis.adjoint().conjugate(&x_diag).expect("dims"));

    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let mut w_eig = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim {
        let from = perm[k];
        let to = perm[(k + 1) % dim];
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        w_eig[(to, from)] = Complex64::from_polar(1.0, theta);
    }
    let w = basis
        .adjoint()
        .conjugate(&ComplexMatrix::from_inner(w_eig))
        .expect("dims");
    (x, UnitaryMatrix::from_trusted(w))
}
