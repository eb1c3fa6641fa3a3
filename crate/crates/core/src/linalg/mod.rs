//! Dense complex linear algebra for small Hermitian matrices.

mod eig;
mod info;
mod matrix;

pub use eig::{
    hermitian_eig, hermitian_eigenvalues, matrix_sqrt_psd, EigenDecomposition, PSD_CLIP,
};
pub use info::{
    expectation, fidelity, fidelity_with_sqrt, partial_trace, relative_entropy, shannon_entropy,
    sqrt_state, von_neumann_entropy, SPECTRAL_FLOOR, SUPPORT_TOL,
};
pub use matrix::{kron, ComplexMatrix, ONE, ZERO};
