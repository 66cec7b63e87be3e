//! Dense complex linear algebra used throughout the crate.

mod eigen;
mod matrix;

pub use eigen::{
    hermitian_eigs, newton_power_to_elementary, operator_norm, orthonormalize_columns, pd_sqrt, power_trace,
    psd_eigenvalues, singular_values, HermitianSpectrum, PowerSums,
};
pub use matrix::{ComplexMatrix, Lu, C64, I, ONE, ZERO};
