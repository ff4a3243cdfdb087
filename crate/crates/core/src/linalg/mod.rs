//! Dense complex linear algebra: matrices, Hermitian eigenproblems, SVD and
//! numerical ranges.

pub mod eig;
pub mod matrix;
pub mod numrange;
pub mod svd;

pub use eig::{herm_eig, herm_eigenvalues, HermEigen};
pub use matrix::{basis_vector, dot, norm, normalized, ComplexMatrix, C64, ONE, ZERO};
pub use numrange::{zero_in_numrange, zero_preimage, Membership, NumRangeVerdict};
pub use svd::{spectral_norm, svd, SvdResult};
