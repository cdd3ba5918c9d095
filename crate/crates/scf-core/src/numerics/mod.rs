//! Minimal dense complex linear algebra: a row-major matrix type, Hermitian
//! eigendecomposition, and Hermitian-positive-definite solves. Matrices in
//! this simulator stay small (tens of rows), so straightforward O(n^3)
//! kernels are used throughout.

mod cholesky;
mod evd;
mod matrix;

pub use cholesky::{solve_hpd, CholeskyFactor};
pub use evd::{hermitian_evd, HermitianEvd};
pub use matrix::{dot_h, norm_sq, ComplexMatrix};
