//! Dense complex linear algebra: the numeric substrate for everything else.

pub mod eig;
pub mod general;
pub mod matrix;
pub mod svd;

pub use eig::{hermitian_eig, psd_check, spectral_norm, EigDecomposition, HERMITIAN_TOL};
pub use general::{eigenvalues, inverse, Lu};
pub use matrix::{adjoint, kron, ComplexMatrix, C64, ONE, ZERO};
pub use svd::{nullspace, pinv, rank, sigma_min, svd, Svd, RANK_TOL};
