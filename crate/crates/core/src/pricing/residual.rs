//! PDE residuals: the transformed operator equation in `(t, z)` and the two
//! scalar forms in `(t, x)` for the Brownian and Poisson cases.

use serde::Serialize;

use super::closed_form::{prepare, strike_weighted, unit_greeks};
use super::model::{MarketModel, ResidualReport};
use crate::error::{QbsError, Result};
use crate::operator::{spectral_decompose, HermitianMatrix};
use crate::tolerance;

/// Default central-difference step in `t` and `z`.
pub const FD_STEP: f64 = 1e-4;

/// Per-unit-strike residual `ω_t − ½ω_zz − (r − ½)ω_z + rω` of the closed form.
pub fn unit_residual_eq8(t: f64, z: f64, r: f64) -> f64 {
    let g = unit_greeks(t, z, r);
    g.d_t - 0.5 * g.d_zz - (r - 0.5) * g.d_z + r * g.value
}

fn spectral_norm(m: &HermitianMatrix) -> Result<f64> {
    Ok(spectral_decompose(m)?.spectral_radius())
}

fn operator_report(
    t: f64,
    z: &HermitianMatrix,
    model: &MarketModel,
    unit: impl Fn(f64) -> f64,
) -> Result<ResidualReport> {
    let spec = prepare(t, z, model)?;
    let residual = strike_weighted(&spec, &model.strike, unit)?;
    let grid = spec.eigenvalues.iter().map(|&x| (t, x)).collect();
    Ok(ResidualReport::new(
        spectral_norm(&residual)?,
        tolerance::PDE_RESIDUAL,
        grid,
    ))
}

/// Residual of the closed-form solution, from the analytic derivatives.
pub fn residual_eq8(t: f64, z: &HermitianMatrix, model: &MarketModel) -> Result<ResidualReport> {
    let r = model.rate;
    operator_report(t, z, model, |x| unit_residual_eq8(t, x, r))
}

/// Residual over a grid of times, worst case reported.
pub fn residual_eq8_grid(
    times: &[f64],
    z: &HermitianMatrix,
    model: &MarketModel,
) -> Result<ResidualReport> {
    if times.is_empty() {
        return Err(QbsError::invalid("times", "grid is empty"));
    }
    let reports = times
        .iter()
        .map(|&t| residual_eq8(t, z, model))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::merge(reports, tolerance::PDE_RESIDUAL))
}

/// Residual of an arbitrary candidate `K · f(t, z)` using central
/// differences of step `step` in both arguments. `f` is given per unit strike.
pub fn residual_eq8_candidate(
    t: f64,
    z: &HermitianMatrix,
    model: &MarketModel,
    candidate: impl Fn(f64, f64) -> f64,
    step: f64,
) -> Result<ResidualReport> {
    if !(step > 0.0 && step < t) {
        return Err(QbsError::invalid(
            "step",
            format!("need 0 < step < t, got {step}"),
        ));
    }
    let r = model.rate;
    let h = step;
    operator_report(t, z, model, |x| {
        let f = candidate(t, x);
        let d_t = (candidate(t + h, x) - candidate(t - h, x)) / (2.0 * h);
        let up = candidate(t, x + h);
        let down = candidate(t, x - h);
        let d_z = (up - down) / (2.0 * h);
        let d_zz = (up - 2.0 * f + down) / (h * h);
        d_t - 0.5 * d_zz - (r - 0.5) * d_z + r * f
    })
}

/// Finite-difference steps for the scalar residuals: absolute in `t`,
/// relative to `x` in space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSteps {
    pub t: f64,
    pub x_relative: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self {
            t: FD_STEP,
            x_relative: FD_STEP,
        }
    }
}

fn check_grid(grid: &[(f64, f64)], t_step: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(QbsError::invalid("grid", "grid is empty"));
    }
    for &(t, x) in grid {
        if !(x > 0.0 && x.is_finite()) {
            return Err(QbsError::invalid("grid", format!("x must be > 0, got {x}")));
        }
        if !(t > t_step && t.is_finite()) {
            return Err(QbsError::invalid(
                "grid",
                format!("t must exceed the time step {t_step}, got {t}"),
            ));
        }
    }
    Ok(())
}

/// Brownian-case scalar equation
/// `u_t = ½ u_xx g(x) + u_x x r − u r` checked by central differences.
pub fn residual_brownian_scalar(
    u: impl Fn(f64, f64) -> f64,
    gfun: impl Fn(f64) -> f64,
    r: f64,
    grid: &[(f64, f64)],
    steps: FdSteps,
) -> Result<ResidualReport> {
    check_grid(grid, steps.t)?;
    let mut worst: f64 = 0.0;
    for &(t, x) in grid {
        let ht = steps.t;
        let hx = steps.x_relative * x;
        let f = u(t, x);
        let u_t = (u(t + ht, x) - u(t - ht, x)) / (2.0 * ht);
        let up = u(t, x + hx);
        let down = u(t, x - hx);
        let u_x = (up - down) / (2.0 * hx);
        let u_xx = (up - 2.0 * f + down) / (hx * hx);
        let residual = u_t - 0.5 * u_xx * gfun(x) - u_x * x * r + f * r;
        worst = worst.max(residual.abs());
    }
    Ok(ResidualReport::new(
        worst,
        tolerance::PDE_RESIDUAL,
        grid.to_vec(),
    ))
}

/// A candidate with analytic partial derivatives of every order in `x`.
pub trait SmoothSurface {
    fn value(&self, t: f64, x: f64) -> f64;
    fn d_t(&self, t: f64, x: f64) -> f64;
    /// `∂ⁿu/∂xⁿ`; `order = 0` is the value.
    fn d_x(&self, t: f64, x: f64, order: u32) -> f64;
}

/// Poisson-case residual with its derivative series truncated at `k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonResidual {
    pub report: ResidualReport,
    /// Largest `|u_{0 k_max} g / k_max!|` on the grid.
    pub tail_estimate: f64,
    pub k_max: u32,
}

/// `u_t − Σ_{k=2}^{k_max} u_{0k} g(x)/k! − u_x x r + u r`.
pub fn residual_poisson_scalar<U: SmoothSurface + ?Sized>(
    u: &U,
    gfun: impl Fn(f64) -> f64,
    r: f64,
    k_max: u32,
    grid: &[(f64, f64)],
) -> Result<PoissonResidual> {
    if k_max < 2 {
        return Err(QbsError::invalid(
            "k_max",
            format!("must be >= 2, got {k_max}"),
        ));
    }
    check_grid(grid, 0.0)?;
    let mut worst: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for &(t, x) in grid {
        let g = gfun(x);
        let mut series = 0.0;
        let mut factorial = 1.0;
        let mut last = 0.0;
        for k in 2..=k_max {
            factorial *= k as f64;
            last = u.d_x(t, x, k) * g / factorial;
            series += last;
        }
        let residual = u.d_t(t, x) - series - u.d_x(t, x, 1) * x * r + u.value(t, x) * r;
        worst = worst.max(residual.abs());
        tail = tail.max(last.abs());
    }
    Ok(PoissonResidual {
        report: ResidualReport::new(worst, tolerance::PDE_RESIDUAL, grid.to_vec()),
        tail_estimate: tail,
        k_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ito::ModelOperators;
    use crate::operator::{ComplexMatrix, UnitaryMatrix};
    use crate::pricing::classical_bs;
    use crate::pricing::closed_form::unit_price;

    fn model(k: HermitianMatrix, r: f64) -> MarketModel {
        let d = k.dim();
        let ops = ModelOperators::new(
            HermitianMatrix::identity(d),
            HermitianMatrix::zeros(d),
            ComplexMatrix::zeros(d),
            UnitaryMatrix::identity(d),
        )
        .unwrap();
        MarketModel::new(ops, k, r, 1.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_solves_the_transformed_equation() {
        let m = model(HermitianMatrix::from_real_diagonal(&[1.0, 2.5, 0.7]), 0.05);
        let z = HermitianMatrix::from_real_diagonal(&[-2.0, 0.3, 2.0]);
        let rep = residual_eq8_grid(&[0.1, 0.5, 1.0, 2.0], &z, &m).unwrap();
        assert!(rep.passed, "{}", rep.residual_norm);
        assert!(rep.residual_norm < 1e-12);
        assert_eq!(rep.grid.len(), 12);
    }

    #[test]
    fn scalar_at_the_money_by_finite_differences() {
        let m = model(HermitianMatrix::identity(1), 0.0);
        let z = HermitianMatrix::zeros(1);
        assert!(residual_eq8(1.0, &z, &m).unwrap().residual_norm <= 1e-8);
        let fd =
            residual_eq8_candidate(1.0, &z, &m, |t, x| unit_price(t, x, 0.0), FD_STEP).unwrap();
        assert!(fd.residual_norm <= 1e-6, "{}", fd.residual_norm);
    }

    #[test]
    fn additive_time_drift_is_detected() {
        let m = model(HermitianMatrix::identity(2), 0.05);
        let z = HermitianMatrix::from_real_diagonal(&[-0.4, 0.9]);
        let rep = residual_eq8_candidate(
            0.5,
            &z,
            &m,
            |t, x| unit_price(t, x, 0.05) + 0.01 * t,
            FD_STEP,
        )
        .unwrap();
        assert!(rep.residual_norm > 1e-3);
        assert!(!rep.passed);
    }

    #[test]
    fn exponential_shift_lies_in_the_kernel() {
        // e^z is the stock itself and solves the equation, so this
        // perturbation cannot be detected by any residual.
        let m = model(HermitianMatrix::identity(1), 0.05);
        let z = HermitianMatrix::scalar(1, 0.2);
        let rep = residual_eq8_candidate(
            1.0,
            &z,
            &m,
            |t, x| unit_price(t, x, 0.05) + 0.01 * x.exp(),
            FD_STEP,
        )
        .unwrap();
        assert!(rep.residual_norm < 1e-6);
    }

    #[test]
    fn candidate_step_must_fit_inside_t() {
        let m = model(HermitianMatrix::identity(1), 0.0);
        let z = HermitianMatrix::zeros(1);
        assert!(residual_eq8_candidate(1e-5, &z, &m, |_, _| 0.0, FD_STEP).is_err());
    }

    fn grid() -> Vec<(f64, f64)> {
        let mut g = Vec::new();
        for &t in &[0.1, 0.5, 1.0, 2.0] {
            for &x in &[0.5, 0.8, 1.0, 1.25, 2.0] {
                g.push((t, x));
            }
        }
        g
    }

    #[test]
    fn brownian_scalar_examples() {
        let (k, r) = (1.0, 0.05);
        let bs = |sigma: f64| move |t: f64, x: f64| classical_bs(x, k, r, sigma, t).unwrap().price;
        let g2 = |x: f64| x * x;

        let ok = residual_brownian_scalar(bs(1.0), g2, r, &grid(), FdSteps::default()).unwrap();
        assert!(ok.passed, "{}", ok.residual_norm);

        let bad = residual_brownian_scalar(bs(2.0), g2, r, &grid(), FdSteps::default()).unwrap();
        assert!(bad.residual_norm > 1e-2);

        let fwd = residual_brownian_scalar(|_, x| x, |x| 3.0 * x, r, &grid(), FdSteps::default())
            .unwrap();
        assert!(fwd.residual_norm < 1e-10);
    }

    #[test]
    fn brownian_scalar_grid_errors() {
        let f = |_: f64, x: f64| x;
        let g = |x: f64| x;
        assert!(residual_brownian_scalar(f, g, 0.0, &[(1.0, 0.0)], FdSteps::default()).is_err());
        assert!(residual_brownian_scalar(f, g, 0.0, &[(1e-5, 1.0)], FdSteps::default()).is_err());
        assert!(residual_brownian_scalar(f, g, 0.0, &[], FdSteps::default()).is_err());
    }

    struct Forward;

    impl SmoothSurface for Forward {
        fn value(&self, _: f64, x: f64) -> f64 {
            x
        }
        fn d_t(&self, _: f64, _: f64) -> f64 {
            0.0
        }
        fn d_x(&self, _: f64, x: f64, order: u32) -> f64 {
            match order {
                0 => x,
                1 => 1.0,
                _ => 0.0,
            }
        }
    }

    /// `e^{−rt}(c0 + c1 x + c2 x²)`.
    struct DiscountedQuadratic {
        r: f64,
        c: [f64; 3],
    }

    impl SmoothSurface for DiscountedQuadratic {
        fn value(&self, t: f64, x: f64) -> f64 {
            (-self.r * t).exp() * (self.c[0] + self.c[1] * x + self.c[2] * x * x)
        }
        fn d_t(&self, t: f64, x: f64) -> f64 {
            -self.r * self.value(t, x)
        }
        fn d_x(&self, t: f64, x: f64, order: u32) -> f64 {
            let d = (-self.r * t).exp();
            match order {
                0 => self.value(t, x),
                1 => d * (self.c[1] + 2.0 * self.c[2] * x),
                2 => d * 2.0 * self.c[2],
                _ => 0.0,
            }
        }
    }

    /// `e^{x/2}`, derivatives `2^{-k} e^{x/2}`.
    struct HalfExp;

    impl SmoothSurface for HalfExp {
        fn value(&self, _: f64, x: f64) -> f64 {
            (0.5 * x).exp()
        }
        fn d_t(&self, _: f64, _: f64) -> f64 {
            0.0
        }
        fn d_x(&self, _: f64, x: f64, order: u32) -> f64 {
            0.5f64.powi(order as i32) * (0.5 * x).exp()
        }
    }

    #[test]
    fn poisson_forward_contract() {
        for k in 2..8 {
            let rep = residual_poisson_scalar(&Forward, |x| x, 0.05, k, &grid()).unwrap();
            assert_eq!(rep.report.residual_norm, 0.0);
            assert_eq!(rep.tail_estimate, 0.0);
        }
    }

    #[test]
    fn poisson_quadratic_matches_symbolic_residual() {
        let (r, c) = (0.05, [0.3, -1.2, 0.7]);
        let u = DiscountedQuadratic { r, c };
        let g = |x: f64| 2.0 * x;
        // −e^{−rt}(c2 g(x) + r x (c1 + 2 c2 x)).
        let expected = grid()
            .iter()
            .map(|&(t, x)| ((-r * t).exp() * (c[2] * g(x) + r * x * (c[1] + 2.0 * c[2] * x))).abs())
            .fold(0.0, f64::max);
        for k in [2, 3, 6] {
            let rep = residual_poisson_scalar(&u, g, r, k, &grid()).unwrap();
            assert!((rep.report.residual_norm - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn poisson_tail_shrinks_with_truncation() {
        let mut previous = f64::INFINITY;
        for k in 2..12 {
            let rep = residual_poisson_scalar(&HalfExp, |x| x, 0.0, k, &grid()).unwrap();
            assert!(rep.tail_estimate < previous);
            previous = rep.tail_estimate;
        }
        assert!(residual_poisson_scalar(&HalfExp, |x| x, 0.0, 1, &grid()).is_err());
    }
}
