//! Flow coefficients of `dj_t(X)` and their powers.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::algebra::{ito_product, QuantumStochasticDifferential};
use crate::error::{QbsError, Result};
use crate::operator::{commutator, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::tolerance;

/// System operators of the unitary evolution: stock `X`, Hamiltonian `H`,
/// coupling `L` and scattering `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOperators {
    pub x: HermitianMatrix,
    pub h: HermitianMatrix,
    pub l: ComplexMatrix,
    pub s: UnitaryMatrix,
}

impl ModelOperators {
    pub fn new(
        x: HermitianMatrix,
        h: HermitianMatrix,
        l: ComplexMatrix,
        s: UnitaryMatrix,
    ) -> Result<Self> {
        let d = x.dim();
        for other in [h.dim(), l.dim(), s.dim()] {
            if other != d {
                return Err(QbsError::DimensionMismatch {
                    left: d,
                    right: other,
                });
            }
        }
        Ok(Self { x, h, l, s })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Truncated Poisson model: `X = diag(0, 1, …, d−1)`, `S` the cyclic
    /// shift, `H = L = 0`.
    pub fn truncated_shift(dim: usize) -> Self {
        let levels: Vec<f64> = (0..dim).map(|k| k as f64).collect();
        Self {
            x: HermitianMatrix::from_real_diagonal(&levels),
            h: HermitianMatrix::zeros(dim),
            l: ComplexMatrix::zeros(dim),
            s: UnitaryMatrix::cyclic_shift(dim),
        }
    }

    pub fn with_x(&self, x: HermitianMatrix) -> Result<Self> {
        Self::new(x, self.h.clone(), self.l.clone(), self.s.clone())
    }

    fn check(&self, x: &HermitianMatrix) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(QbsError::DimensionMismatch {
                left: x.dim(),
                right: self.dim(),
            });
        }
        Ok(())
    }
}

/// `(α, α†, λ, θ)` for a given observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowCoefficients {
    pub alpha: ComplexMatrix,
    pub alpha_dagger: ComplexMatrix,
    pub lambda: ComplexMatrix,
    pub theta: ComplexMatrix,
}

impl FlowCoefficients {
    /// Worst violation of `α† = α*`, `λ = λ*`, `θ = θ*`, each scaled by
    /// `max(1, ‖·‖_F)`.
    pub fn structure_defect(&self) -> f64 {
        let adj = (&self.alpha.adjoint() - &self.alpha_dagger).norm_fro()
            / self.alpha.norm_fro().max(1.0);
        let lam = self.lambda.hermitian_defect() / self.lambda.norm_fro().max(1.0);
        let th = self.theta.hermitian_defect() / self.theta.norm_fro().max(1.0);
        adj.max(lam).max(th)
    }
}

/// `θ = i[H,X] − ½(L*L X + X L*L − 2 L* X L)` for an arbitrary (not
/// necessarily Hermitian) argument.
pub(crate) fn generator_apply(x: &ComplexMatrix, m: &ModelOperators) -> ComplexMatrix {
    let l = &m.l;
    let ls = l.adjoint();
    let lsl = &ls * l;
    let hamiltonian = commutator(m.h.matrix(), x)
        .expect("dims checked")
        .scale_complex(Complex64::new(0.0, 1.0));
    let lsl_x = &lsl * x;
    let x_lsl = x * &lsl;
    let ls_x_l = &(&ls * x) * l;
    let dissipator = &(&lsl_x + &x_lsl) - &ls_x_l.scale(2.0);
    &hamiltonian - &dissipator.scale(0.5)
}

/// `α = [L*,X] S`, `α† = S*[X,L]`, `λ = S*XS − X`, and the Lindblad term `θ`.
pub fn flow_coefficients(x: &HermitianMatrix, m: &ModelOperators) -> Result<FlowCoefficients> {
    m.check(x)?;
    let xm = x.matrix();
    let s = m.s.matrix();
    let ss = s.adjoint();
    let alpha = &commutator(&m.l.adjoint(), xm)? * s;
    let alpha_dagger = &ss * &commutator(xm, &m.l)?;
    let lambda = &(&(&ss * xm) * s) - xm;
    let theta = generator_apply(xm, m);
    Ok(FlowCoefficients {
        alpha,
        alpha_dagger,
        lambda,
        theta,
    })
}

/// `dj_t(X) = α† dA† + λ dΛ + α dA + θ dt`.
pub fn flow_differential(
    x: &HermitianMatrix,
    m: &ModelOperators,
) -> Result<QuantumStochasticDifferential> {
    let c = flow_coefficients(x, m)?;
    Ok(QuantumStochasticDifferential {
        creation: c.alpha_dagger,
        conservation: c.lambda,
        annihilation: c.alpha,
        time: c.theta,
    })
}

/// `(dj_t(X))^k = λ^{k−1}α† dA† + λ^k dΛ + αλ^{k−1} dA + αλ^{k−2}α† dt` for `k ≥ 2`.
pub fn qsd_power_closed_form(
    x: &HermitianMatrix,
    m: &ModelOperators,
    k: u32,
) -> Result<QuantumStochasticDifferential> {
    if k < 2 {
        return Err(QbsError::invalid(
            "k",
            format!("power must be >= 2, got {k}"),
        ));
    }
    let c = flow_coefficients(x, m)?;
    let lam_km2 = c.lambda.pow(k - 2);
    let lam_km1 = &lam_km2 * &c.lambda;
    Ok(QuantumStochasticDifferential {
        creation: &lam_km1 * &c.alpha_dagger,
        conservation: &lam_km1 * &c.lambda,
        annihilation: &c.alpha * &lam_km1,
        time: &(&c.alpha * &lam_km2) * &c.alpha_dagger,
    })
}

/// `(dj_t(X))^k` by repeated left multiplication with `dj_t(X)`.
pub fn qsd_power_iterated(
    x: &HermitianMatrix,
    m: &ModelOperators,
    k: u32,
) -> Result<QuantumStochasticDifferential> {
    if k < 1 {
        return Err(QbsError::invalid("k", "power must be >= 1"));
    }
    let d = flow_differential(x, m)?;
    let mut acc = d.clone();
    for _ in 1..k {
        acc = ito_product(&d, &acc)?;
    }
    Ok(acc)
}

/// Worst deviation for one `(dim, k)` cell of the power-rule suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRuleCell {
    pub dim: usize,
    pub k: u32,
    pub trials: usize,
    pub max_relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRuleReport {
    pub cells: Vec<PowerRuleCell>,
    pub max_relative_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares the closed-form and iterated powers on random models.
///
/// Each dimension gets its own seeded stream, so the sampled models do not
/// depend on which other dimensions are requested.
pub fn power_rule_suite(
    dims: &[usize],
    k_max: u32,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<PowerRuleReport> {
    if k_max < 2 {
        return Err(QbsError::invalid("k_max", "must be >= 2"));
    }
    let mut cells = Vec::new();
    for &dim in dims {
        if dim == 0 {
            return Err(QbsError::invalid("dims", "dimension must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(dim as u64);
        let mut worst = vec![0.0f64; (k_max - 1) as usize];
        for _ in 0..trials {
            let m = crate::random::model(dim, &mut rng);
            for k in 2..=k_max {
                let closed = qsd_power_closed_form(&m.x, &m, k)?;
                let iterated = qsd_power_iterated(&m.x, &m, k)?;
                let dev = closed.max_relative_distance(&iterated)?;
                let w = &mut worst[(k - 2) as usize];
                *w = w.max(dev);
            }
        }
        for k in 2..=k_max {
            cells.push(PowerRuleCell {
                dim,
                k,
                trials,
                max_relative_deviation: worst[(k - 2) as usize],
            });
        }
    }
    let max_relative_deviation = cells
        .iter()
        .fold(0.0f64, |m, c| m.max(c.max_relative_deviation));
    Ok(PowerRuleReport {
        cells,
        max_relative_deviation,
        tolerance,
        passed: max_relative_deviation <= tolerance,
    })
}

/// Outcome of the `S = I` reduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrownianReport {
    /// `‖λ‖_F`.
    pub lambda_norm: f64,
    /// `‖α − [L*,X]‖_F`.
    pub alpha_deviation: f64,
    /// `‖α† − [X,L]‖_F`.
    pub alpha_dagger_deviation: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// With `S = I`: `λ = 0`, `α = [L*,X]`, `α† = [X,L]`.
pub fn brownian_reduction_check(m: &ModelOperators) -> Result<BrownianReport> {
    let n = m.dim();
    let defect = m.s.matrix().distance(&ComplexMatrix::identity(n))?;
    if defect > tolerance::UNITARY {
        return Err(QbsError::NotIdentity { defect });
    }
    let c = flow_coefficients(&m.x, m)?;
    let lambda_norm = c.lambda.norm_fro();
    let alpha_deviation = c
        .alpha
        .distance(&commutator(&m.l.adjoint(), m.x.matrix())?)?;
    let alpha_dagger_deviation = c.alpha_dagger.distance(&commutator(m.x.matrix(), &m.l)?)?;
    let max_deviation = lambda_norm.max(alpha_deviation).max(alpha_dagger_deviation);
    let scale = m.x.matrix().norm_fro().max(c.alpha.norm_fro()).max(1.0);
    let tolerance = tolerance::BROWNIAN_REDUCTION * scale;
    Ok(BrownianReport {
        lambda_norm,
        alpha_deviation,
        alpha_dagger_deviation,
        max_deviation,
        tolerance,
        passed: max_deviation <= tolerance,
    })
}

/// Outcome of checking `λ = S*XS − X = I` on a finite truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonReport {
    pub mask: Vec<usize>,
    /// Largest `|(λ − I)_ij|` with both indices in the mask.
    pub interior_deviation: f64,
    /// Largest `|(λ − I)_ij|` over the whole matrix.
    pub full_deviation: f64,
    /// Largest `|λ_ij|` with at least one index outside the mask.
    pub wrap_defect: f64,
    pub lambda_trace: [f64; 2],
    /// `trace λ = 0 ≠ dim`, so `λ = I` cannot hold exactly. Always set at
    /// finite dimension; recorded so reports are explicit about it.
    pub trace_obstruction: bool,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn poisson_reduction_check(
    m: &ModelOperators,
    interior_mask: &[usize],
) -> Result<PoissonReport> {
    if interior_mask.is_empty() {
        return Err(QbsError::invalid("interior_mask", "mask is empty"));
    }
    let n = m.dim();
    if let Some(&bad) = interior_mask.iter().find(|&&i| i >= n) {
        return Err(QbsError::invalid(
            "interior_mask",
            format!("index {bad} out of range for dimension {n}"),
        ));
    }
    let mut inside = vec![false; n];
    for &i in interior_mask {
        inside[i] = true;
    }
    let c = flow_coefficients(&m.x, m)?;
    let lam = &c.lambda;
    let mut interior: f64 = 0.0;
    let mut full: f64 = 0.0;
    let mut wrap: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (lam.get(i, j) - Complex64::new(target, 0.0)).norm();
            full = full.max(dev);
            if inside[i] && inside[j] {
                interior = interior.max(dev);
            } else {
                wrap = wrap.max(lam.get(i, j).norm());
            }
        }
    }
    let tr = lam.trace();
    let trace_obstruction = (tr - Complex64::new(n as f64, 0.0)).norm() > 0.5;
    let mut mask = interior_mask.to_vec();
    mask.sort_unstable();
    mask.dedup();
    Ok(PoissonReport {
        mask,
        interior_deviation: interior,
        full_deviation: full,
        wrap_defect: wrap,
        lambda_trace: [tr.re, tr.im],
        trace_obstruction,
        tolerance: tolerance::POISSON_INTERIOR,
        passed: interior <= tolerance::POISSON_INTERIOR,
    })
}
