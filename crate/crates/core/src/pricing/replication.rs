//! Scalar delta-hedging Monte Carlo under the pricing measure.
//!
//! Each path draws from its own ChaCha stream (`seed`, stream = path index),
//! so the statistics do not depend on how rayon schedules the paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classical::classical_bs;
use super::model::require_positive;
use crate::error::{QbsError, Result};

pub const MIN_STEPS: usize = 100;
pub const MIN_PATHS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationConfig {
    pub x0: f64,
    pub strike: f64,
    pub rate: f64,
    pub maturity: f64,
    #[serde(default = "unit_volatility")]
    pub volatility: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
}

fn unit_volatility() -> f64 {
    1.0
}

impl ReplicationConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("x0", self.x0)?;
        require_positive("strike", self.strike)?;
        require_positive("maturity", self.maturity)?;
        require_positive("volatility", self.volatility)?;
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(QbsError::invalid(
                "rate",
                format!("must be finite and >= 0, got {}", self.rate),
            ));
        }
        if self.steps < MIN_STEPS {
            return Err(QbsError::invalid(
                "steps",
                format!("need at least {MIN_STEPS}, got {}", self.steps),
            ));
        }
        if self.paths < MIN_PATHS {
            return Err(QbsError::invalid(
                "paths",
                format!("need at least {MIN_PATHS}, got {}", self.paths),
            ));
        }
        Ok(())
    }
}

/// Statistics of `V_T − (X_T − K)^+` over all paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationStats {
    pub paths: usize,
    pub steps: usize,
    pub initial_price: f64,
    pub mean_payoff: f64,
    pub mean_error: f64,
    pub std_error: f64,
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
}

struct PathOutcome {
    payoff: f64,
    error: f64,
}

fn hedge_path(cfg: &ReplicationConfig, initial: f64, path: u64) -> PathOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(path);
    let dt = cfg.maturity / cfg.steps as f64;
    let sigma = cfg.volatility;
    let drift = (cfg.rate - 0.5 * sigma * sigma) * dt;
    let shock = sigma * dt.sqrt();
    let growth = (cfg.rate * dt).exp();
    let delta_at = |x: f64, tau: f64| {
        classical_bs(x, cfg.strike, cfg.rate, sigma, tau)
            .map(|q| q.delta)
            .unwrap_or(if x > cfg.strike { 1.0 } else { 0.0 })
    };

    let mut x = cfg.x0;
    let mut delta = delta_at(x, cfg.maturity);
    let mut cash = initial - delta * x;
    for i in 1..=cfg.steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        x *= (drift + shock * z).exp();
        cash *= growth;
        if i < cfg.steps {
            let next = delta_at(x, cfg.maturity - i as f64 * dt);
            cash -= (next - delta) * x;
            delta = next;
        }
    }
    let payoff = (x - cfg.strike).max(0.0);
    PathOutcome {
        payoff,
        error: delta * x + cash - payoff,
    }
}

/// Runs the hedge on `cfg.paths` independent paths. Starting wealth is the
/// closed-form price; holdings are the classical delta, rebalanced each step.
pub fn replication_simulation(cfg: &ReplicationConfig) -> Result<ReplicationStats> {
    cfg.validate()?;
    let initial = classical_bs(cfg.x0, cfg.strike, cfg.rate, cfg.volatility, cfg.maturity)?.price;
    let outcomes: Vec<PathOutcome> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|p| hedge_path(cfg, initial, p))
        .collect();

    let n = outcomes.len() as f64;
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut sum_payoff = 0.0;
    let mut max_abs: f64 = 0.0;
    for o in &outcomes {
        sum += o.error;
        sum_abs += o.error.abs();
        sum_payoff += o.payoff;
        max_abs = max_abs.max(o.error.abs());
    }
    let mean = sum / n;
    let var = outcomes
        .iter()
        .map(|o| (o.error - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Ok(ReplicationStats {
        paths: cfg.paths,
        steps: cfg.steps,
        initial_price: initial,
        mean_payoff: sum_payoff / n,
        mean_error: mean,
        std_error: var.sqrt(),
        mean_abs_error: sum_abs / n,
        max_abs_error: max_abs,
    })
}
