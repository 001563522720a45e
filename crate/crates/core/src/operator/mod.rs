//! Dense complex operators and Hermitian functional calculus.

mod matrix;
mod normal;
mod spectral;
mod sylvester;

pub use matrix::{adjoint, commutator, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
pub use normal::{normal_cdf, normal_pdf, phi_series, PHI_SERIES_WINDOW};
pub use spectral::{
    apply_scalar_function, check_commuting, operator_exp, operator_log, phi_operator,
    positive_part, spectral_decompose, unitary_exp, SpectralDecomposition,
};
pub use sylvester::sylvester_l;
