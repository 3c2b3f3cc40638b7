//! Dense real and split-complex linear algebra.

mod eigen;
mod json;
mod lu;
mod matrix;
mod split;
mod svd;

pub use eigen::{hermitian_eigenvalues, sym_eigen, SymEigen};
pub use json::MatrixJson;
pub use lu::{lu_solve, relative_residual, Lu, SINGULAR_PIVOT};
pub use matrix::{unvec, vec, Matrix};
pub use split::{outer_h, Side, SplitMatrix, SplitScalar, SplitVector};
pub use svd::{jacobi_svd, SvdResult, RANK_TOL};

pub(crate) use matrix::{dot, norm_inf};
