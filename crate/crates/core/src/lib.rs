//! Derivatives of singular values and singular vectors of complex matrices.
//!
//! Three adjoint formulations are provided (left and right Gram-matrix
//! eigenproblems and the symmetric embedding), together with a closed-form
//! reverse-mode singular value gradient, a finite-difference oracle and a
//! snapshot POD sensitivity pipeline.
//!
//! ```
//! use dsvd::{cases, governing, rad};
//!
//! let case = cases::square();
//! let t = governing::solve_triplet(&case.a, &case.spec).unwrap();
//! let (gr, _gi) = rad::sigma_grad_complex(&t);
//! assert!((t.sigma - 33.16357940928816).abs() < 1e-11);
//! assert_eq!(gr.shape(), (3, 3));
//! ```

pub mod adjoint;
pub mod cases;
pub mod error;
pub mod governing;
pub mod linalg;
pub mod objective;
pub mod pod;
pub mod rad;
pub mod report;
pub mod scalar;
pub mod verify;

pub use adjoint::{total_gradient, AdjointVector, GradientBundle};
pub use error::{Error, Result};
pub use governing::{Formulation, PhaseConvention, SingularTriplet};
pub use linalg::{Matrix, Side, SplitMatrix, SplitVector};
pub use objective::{LinearObjectiveParams, ObjectiveSpec};
pub use scalar::Real;

pub type Matrix64 = Matrix<f64>;
pub type SplitMatrix64 = SplitMatrix<f64>;
pub type SplitVector64 = SplitVector<f64>;
pub type Triplet64 = SingularTriplet<f64>;
pub type GradientBundle64 = GradientBundle<f64>;
pub type Matrix32 = Matrix<f32>;
pub type SplitMatrix32 = SplitMatrix<f32>;
