//! Built-in verification cases: a 3×3 and a 4×2 complex matrix with linear
//! objectives and the phase conventions their reference vectors are listed in.

use crate::governing::{Anchor, PhaseConvention, Pivot, PivotSign, TripletSpec};
use crate::linalg::{SplitMatrix, SplitVector};
use crate::objective::{linear_objective, LinearObjectiveParams, ObjectiveSpec};

#[derive(Clone, Debug)]
pub struct GoldenCase {
    pub name: &'static str,
    pub a: SplitMatrix<f64>,
    pub params: LinearObjectiveParams<f64>,
    pub spec: TripletSpec,
}

impl GoldenCase {
    pub fn objective(&self) -> ObjectiveSpec<f64> {
        linear_objective(self.params.clone())
    }

    /// `f = σ` on the same matrix.
    pub fn sigma_objective(&self) -> ObjectiveSpec<f64> {
        ObjectiveSpec::sigma()
    }
}

fn cvec(re: &[f64], im: &[f64]) -> SplitVector<f64> {
    SplitVector::new(re.to_vec(), im.to_vec()).expect("equal lengths")
}

pub fn square() -> GoldenCase {
    let a = SplitMatrix::from_rows(
        &[
            vec![-1.01, 0.86, -31.42],
            vec![3.98, 0.53, -7.04],
            vec![3.3, 8.26, -3.89],
        ],
        &[
            vec![0.6, 0.79, 5.47],
            vec![7.21, 1.9, 0.58],
            vec![3.42, 8.97, 0.3],
        ],
    )
    .expect("3x3");
    let c = cvec(&[0.16, 0.53, 0.11], &[0.78, 0.11, 0.77]);
    GoldenCase {
        name: "square",
        a,
        params: LinearObjectiveParams {
            c_u: c.clone(),
            c_v: c,
            c_sigma: 1.0,
            c_a: 1.0,
            per_vector_phase: true,
        },
        spec: TripletSpec::with_convention(PhaseConvention::left_argmax()),
    }
}

pub fn rect() -> GoldenCase {
    let a = SplitMatrix::from_rows(
        &[
            vec![6.3, 5.0],
            vec![-5.35, 0.62],
            vec![-7.49, -1.6],
            vec![-0.15, 0.71],
        ],
        &[
            vec![4.49, -9.95],
            vec![-1.23, 7.29],
            vec![6.17, -1.9],
            vec![-4.89, -3.63],
        ],
    )
    .expect("4x2");
    GoldenCase {
        name: "rect",
        a,
        params: LinearObjectiveParams {
            c_u: cvec(&[0.12, 0.56, 0.46, 2.89], &[0.67, 3.67, 2.96, 1.48]),
            c_v: cvec(&[7.12, 0.26], &[0.97, 6.47]),
            c_sigma: 1.0,
            c_a: 1.0,
            per_vector_phase: true,
        },
        spec: TripletSpec::with_convention(PhaseConvention::new(
            Anchor::Right,
            Pivot::Fixed(0),
            PivotSign::Negative,
        )),
    }
}

pub fn by_name(name: &str) -> Option<GoldenCase> {
    match name {
        "square" => Some(square()),
        "rect" => Some(rect()),
        _ => None,
    }
}
