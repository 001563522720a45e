//! Quantum stochastic differentials and the Hudson–Parthasarathy Itô table.
//!
//! A differential `c dA† + l dΛ + a dA + τ dt` is stored by its four system
//! coefficients. The flow `j_t` is never materialized: since it is a
//! homomorphism, products of `j_t` images are computed as products of the
//! coefficients themselves.

use std::ops::{Add, Mul};

use serde::Serialize;

use crate::error::{QbsError, Result};
use crate::operator::ComplexMatrix;

/// Coefficients of `dA†`, `dΛ`, `dA` and `dt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumStochasticDifferential {
    pub creation: ComplexMatrix,
    pub conservation: ComplexMatrix,
    pub annihilation: ComplexMatrix,
    pub time: ComplexMatrix,
}

/// One of the four basic integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Creation,
    Conservation,
    Annihilation,
    Time,
}

impl Integrator {
    pub const ALL: [Integrator; 4] = [
        Integrator::Creation,
        Integrator::Conservation,
        Integrator::Annihilation,
        Integrator::Time,
    ];

    /// Itô table, row times column:
    ///
    /// | ·   | dA† | dΛ | dA | dt |
    /// |-----|-----|----|----|----|
    /// | dA† | 0   | 0  | 0  | 0  |
    /// | dΛ  | dA† | dΛ | 0  | 0  |
    /// | dA  | dt  | dA | 0  | 0  |
    /// | dt  | 0   | 0  | 0  | 0  |
    pub fn product(self, rhs: Integrator) -> Option<Integrator> {
        use Integrator::*;
        match (self, rhs) {
            (Conservation, Creation) => Some(Creation),
            (Conservation, Conservation) => Some(Conservation),
            (Annihilation, Creation) => Some(Time),
            (Annihilation, Conservation) => Some(Annihilation),
            _ => None,
        }
    }
}

impl QuantumStochasticDifferential {
    pub fn new(
        creation: ComplexMatrix,
        conservation: ComplexMatrix,
        annihilation: ComplexMatrix,
        time: ComplexMatrix,
    ) -> Result<Self> {
        let d = creation.dim();
        for other in [&conservation, &annihilation, &time] {
            if other.dim() != d {
                return Err(QbsError::DimensionMismatch {
                    left: d,
                    right: other.dim(),
                });
            }
        }
        Ok(Self {
            creation,
            conservation,
            annihilation,
            time,
        })
    }

    pub fn zero(dim: usize) -> Self {
        let z = ComplexMatrix::zeros(dim);
        Self {
            creation: z.clone(),
            conservation: z.clone(),
            annihilation: z.clone(),
            time: z,
        }
    }

    /// A differential with a single nonzero slot.
    pub fn pure(integrator: Integrator, coefficient: ComplexMatrix) -> Self {
        let mut d = Self::zero(coefficient.dim());
        *d.slot_mut(integrator) = coefficient;
        d
    }

    pub fn dim(&self) -> usize {
        self.creation.dim()
    }

    pub fn slot(&self, integrator: Integrator) -> &ComplexMatrix {
        match integrator {
            Integrator::Creation => &self.creation,
            Integrator::Conservation => &self.conservation,
            Integrator::Annihilation => &self.annihilation,
            Integrator::Time => &self.time,
        }
    }

    fn slot_mut(&mut self, integrator: Integrator) -> &mut ComplexMatrix {
        match integrator {
            Integrator::Creation => &mut self.creation,
            Integrator::Conservation => &mut self.conservation,
            Integrator::Annihilation => &mut self.annihilation,
            Integrator::Time => &mut self.time,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            creation: self.creation.scale(factor),
            conservation: self.conservation.scale(factor),
            annihilation: self.annihilation.scale(factor),
            time: self.time.scale(factor),
        }
    }

    /// Largest per-slot relative Frobenius distance.
    pub fn max_relative_distance(&self, other: &Self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in Integrator::ALL {
            worst = worst.max(self.slot(i).relative_distance(other.slot(i))?);
        }
        Ok(worst)
    }

    /// Largest per-slot absolute Frobenius distance.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in Integrator::ALL {
            worst = worst.max(self.slot(i).distance(other.slot(i))?);
        }
        Ok(worst)
    }
}

impl Add for &QuantumStochasticDifferential {
    type Output = QuantumStochasticDifferential;
    fn add(self, rhs: Self) -> QuantumStochasticDifferential {
        QuantumStochasticDifferential {
            creation: &self.creation + &rhs.creation,
            conservation: &self.conservation + &rhs.conservation,
            annihilation: &self.annihilation + &rhs.annihilation,
            time: &self.time + &rhs.time,
        }
    }
}

impl Mul for &QuantumStochasticDifferential {
    type Output = QuantumStochasticDifferential;
    fn mul(self, rhs: Self) -> QuantumStochasticDifferential {
        ito_product(self, rhs).expect("dimension mismatch in Itô product")
    }
}

/// Bilinear Itô product; the left coefficient multiplies the right one.
pub fn ito_product(
    left: &QuantumStochasticDifferential,
    right: &QuantumStochasticDifferential,
) -> Result<QuantumStochasticDifferential> {
    if left.dim() != right.dim() {
        return Err(QbsError::DimensionMismatch {
            left: left.dim(),
            right: right.dim(),
        });
    }
    let mut out = QuantumStochasticDifferential::zero(left.dim());
    for a in Integrator::ALL {
        for b in Integrator::ALL {
            if let Some(c) = a.product(b) {
                let term = left.slot(a) * right.slot(b);
                let slot = out.slot_mut(c);
                *slot = &*slot + &term;
            }
        }
    }
    Ok(out)
}
