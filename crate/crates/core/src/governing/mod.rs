//! Governing equations of a singular triplet: residuals, phase gauge,
//! triplet selection and Newton polishing.

mod newton;
mod phase;
mod residual;

pub use newton::newton_refine;
pub use phase::{enforce_phase, internal_gauge, phase_factor, PhaseMap};
pub use residual::{gmm_jacobian, gmm_residual, residual, semm_jacobian, semm_residual, State};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd, SplitMatrix, SplitVector, SvdResult};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default relative gap below which two singular values count as repeated.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// The three adjoint formulations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Eigenproblem of `B = A A*` for `u`.
    Lgmm,
    /// Eigenproblem of `C = A* A` for `v`.
    Rgmm,
    /// Symmetric embedding `[[0, A], [A*, 0]]` for the whole triplet.
    Semm,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Lgmm, Formulation::Rgmm, Formulation::Semm];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Lgmm => "lgmm",
            Formulation::Rgmm => "rgmm",
            Formulation::Semm => "semm",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lgmm" => Ok(Formulation::Lgmm),
            "rgmm" => Ok(Formulation::Rgmm),
            "semm" => Ok(Formulation::Semm),
            other => Err(Error::Config(format!("unknown formulation '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Left,
    Right,
}

/// Which component of the anchored vector is made real.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pivot {
    ArgMaxAbs,
    /// 0-based component index.
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotSign {
    Positive,
    Negative,
    /// Keep the sign of the pivot's current real part.
    Keep,
}

/// Gauge fixing rule for the common phase of `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseConvention {
    pub anchor: Anchor,
    pub pivot: Pivot,
    pub sign: PivotSign,
}

impl PhaseConvention {
    pub const fn new(anchor: Anchor, pivot: Pivot, sign: PivotSign) -> Self {
        PhaseConvention {
            anchor,
            pivot,
            sign,
        }
    }

    /// Largest entry of `u` real and positive.
    pub const fn left_argmax() -> Self {
        Self::new(Anchor::Left, Pivot::ArgMaxAbs, PivotSign::Positive)
    }

    /// Largest entry of `v` real and positive.
    pub const fn right_argmax() -> Self {
        Self::new(Anchor::Right, Pivot::ArgMaxAbs, PivotSign::Positive)
    }

    /// Resolves the pivot index on `x`.
    pub fn pivot_index<T: Real>(&self, x: &SplitVector<T>) -> Result<usize> {
        match self.pivot {
            Pivot::ArgMaxAbs => Ok(x.argmax_abs()),
            Pivot::Fixed(k) if k < x.len() => Ok(k),
            Pivot::Fixed(k) => Err(Error::IndexOutOfRange {
                index: k,
                available: x.len(),
            }),
        }
    }
}

impl Default for PhaseConvention {
    fn default() -> Self {
        Self::left_argmax()
    }
}

/// One `(σ, u, v)` group with its gauge.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularTriplet<T> {
    pub sigma: T,
    pub u: SplitVector<T>,
    pub v: SplitVector<T>,
    pub convention: PhaseConvention,
    /// Pivot index in the anchored vector.
    pub k: usize,
}

impl<T: Real> SingularTriplet<T> {
    pub fn anchored(&self) -> &SplitVector<T> {
        match self.convention.anchor {
            Anchor::Left => &self.u,
            Anchor::Right => &self.v,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u.len(), self.v.len())
    }

    pub fn cast<U: Real>(&self) -> SingularTriplet<U> {
        SingularTriplet {
            sigma: U::lit(self.sigma.to_f64_lossy()),
            u: self.u.cast(),
            v: self.v.cast(),
            convention: self.convention,
            k: self.k,
        }
    }
}

/// State of a Gram-matrix eigenproblem, `w = [φ_r; φ_i; λ_r; λ_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GmmState<T> {
    pub phi: SplitVector<T>,
    pub lambda_re: T,
    pub lambda_im: T,
    pub k: usize,
}

impl<T: Real> GmmState<T> {
    /// `φ = u` (left) or `φ = v` (right), `λ = σ²`. The triplet must be
    /// anchored on the same side.
    pub fn from_triplet(kind: Formulation, t: &SingularTriplet<T>) -> Result<Self> {
        let phi = match (kind, t.convention.anchor) {
            (Formulation::Lgmm, Anchor::Left) => t.u.clone(),
            (Formulation::Rgmm, Anchor::Right) => t.v.clone(),
            (Formulation::Semm, _) => {
                return Err(Error::Config("SEMM has no Gram state".into()));
            }
            _ => {
                return Err(Error::Config(format!(
                    "{kind} state needs a triplet anchored on its own vector"
                )));
            }
        };
        Ok(GmmState {
            phi,
            lambda_re: t.sigma * t.sigma,
            lambda_im: T::zero(),
            k: t.k,
        })
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut w = self.phi.stacked();
        w.push(self.lambda_re);
        w.push(self.lambda_im);
        w
    }

    pub fn from_slice(w: &[T], k: usize) -> Self {
        let p = (w.len() - 2) / 2;
        GmmState {
            phi: SplitVector {
                re: w[..p].to_vec(),
                im: w[p..2 * p].to_vec(),
            },
            lambda_re: w[2 * p],
            lambda_im: w[2 * p + 1],
            k,
        }
    }
}

/// State of the symmetric embedding, `w = [u_r; u_i; v_r; v_i; σ_r; σ_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemmState<T> {
    pub u: SplitVector<T>,
    pub v: SplitVector<T>,
    pub sigma_re: T,
    pub sigma_im: T,
    pub k: usize,
}

impl<T: Real> SemmState<T> {
    /// Requires a triplet anchored on `u`.
    pub fn from_triplet(t: &SingularTriplet<T>) -> Result<Self> {
        if t.convention.anchor != Anchor::Left {
            return Err(Error::Config(
                "SEMM state needs a triplet anchored on u".into(),
            ));
        }
        Ok(SemmState {
            u: t.u.clone(),
            v: t.v.clone(),
            sigma_re: t.sigma,
            sigma_im: T::zero(),
            k: t.k,
        })
    }

    pub fn to_triplet(&self, convention: PhaseConvention) -> SingularTriplet<T> {
        SingularTriplet {
            sigma: self.sigma_re,
            u: self.u.clone(),
            v: self.v.clone(),
            convention,
            k: self.k,
        }
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut w = self.u.stacked();
        w.extend(self.v.stacked());
        w.push(self.sigma_re);
        w.push(self.sigma_im);
        w
    }

    pub fn from_slice(w: &[T], m: usize, n: usize, k: usize) -> Self {
        SemmState {
            u: SplitVector {
                re: w[..m].to_vec(),
                im: w[m..2 * m].to_vec(),
            },
            v: SplitVector {
                re: w[2 * m..2 * m + n].to_vec(),
                im: w[2 * m + n..2 * m + 2 * n].to_vec(),
            },
            sigma_re: w[2 * m + 2 * n],
            sigma_im: w[2 * m + 2 * n + 1],
            k,
        }
    }
}

/// Picks the `index`-th (1-based) triplet after a distinctness check and
/// anchors it with the default convention.
pub fn select_triplet<T: Real>(
    res: &SvdResult<T>,
    index: usize,
    gap_tol: T,
) -> Result<SingularTriplet<T>> {
    if index == 0 || index > res.len() {
        return Err(Error::IndexOutOfRange {
            index,
            available: res.len(),
        });
    }
    let i = index - 1;
    let s = res.sigma[i];
    if s.is_nan() || s <= res.rank_tol || s == T::zero() {
        return Err(Error::NearZeroSigma {
            sigma: s.to_f64_lossy(),
            tolerance: res.rank_tol.to_f64_lossy(),
        });
    }
    let threshold = gap_tol * res.sigma[0];
    let gap = res
        .sigma
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &sj)| (s - sj).abs())
        .fold(T::infinity(), T::min);
    if gap.is_nan() || gap <= threshold {
        return Err(Error::RepeatedSingularValue {
            index,
            gap: gap.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    let raw = SingularTriplet {
        sigma: s,
        u: res.u[i].clone(),
        v: res.v[i].clone(),
        convention: PhaseConvention::default(),
        k: 0,
    };
    enforce_phase(&raw, PhaseConvention::default())
}

/// How to extract one triplet from a matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripletSpec {
    /// 1-based singular value index.
    pub index: usize,
    pub convention: PhaseConvention,
    pub gap_tol: f64,
    pub refine: bool,
}

impl Default for TripletSpec {
    fn default() -> Self {
        TripletSpec {
            index: 1,
            convention: PhaseConvention::default(),
            gap_tol: DEFAULT_GAP_TOL,
            refine: true,
        }
    }
}

impl TripletSpec {
    pub fn with_convention(convention: PhaseConvention) -> Self {
        TripletSpec {
            convention,
            ..Self::default()
        }
    }
}

/// `jacobi_svd`, `select_triplet`, Newton polish and phase anchoring in one call.
pub fn solve_triplet<T: Real>(
    a: &SplitMatrix<T>,
    spec: &TripletSpec,
) -> Result<SingularTriplet<T>> {
    let svd = jacobi_svd(a)?;
    let t = select_triplet(&svd, spec.index, T::lit(spec.gap_tol))?;
    let t = if spec.refine {
        let tol = T::lit(1e-13) * svd.sigma[0];
        let state = SemmState::from_triplet(&t)?;
        match newton_refine(a, &state, 10, tol) {
            Ok(s) => s.to_triplet(t.convention),
            Err(Error::Convergence { .. }) => t,
            Err(e) => return Err(e),
        }
    } else {
        t
    };
    enforce_phase(&t, spec.convention)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn diag(d: &[f64]) -> SplitMatrix<f64> {
        let n = d.len();
        SplitMatrix::from_real(Matrix::from_fn(
            n,
            n,
            |i, j| if i == j { d[i] } else { 0.0 },
        ))
    }

    #[test]
    fn repeated_sigma_is_refused() {
        let svd = jacobi_svd(&diag(&[2.0, 2.0])).unwrap();
        assert!(matches!(
            select_triplet(&svd, 1, 1e-8),
            Err(Error::RepeatedSingularValue { .. })
        ));
    }

    #[test]
    fn tiny_gap_is_refused() {
        let svd = jacobi_svd(&diag(&[3.0, 3.0 + 1e-12])).unwrap();
        assert!(select_triplet(&svd, 1, DEFAULT_GAP_TOL).is_err());
    }

    #[test]
    fn index_out_of_range() {
        let svd = jacobi_svd(&diag(&[3.0, 1.0])).unwrap();
        assert!(matches!(
            select_triplet(&svd, 3, 1e-8),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(select_triplet(&svd, 0, 1e-8).is_err());
    }

    #[test]
    fn zero_sigma_is_refused() {
        let svd = jacobi_svd(&diag(&[3.0, 0.0])).unwrap();
        assert!(matches!(
            select_triplet(&svd, 2, 1e-8),
            Err(Error::NearZeroSigma { .. })
        ));
    }

    #[test]
    fn formulation_parses() {
        assert_eq!("SEMM".parse::<Formulation>().unwrap(), Formulation::Semm);
        assert!("rad".parse::<Formulation>().is_err());
    }

    #[test]
    fn state_vector_layout() {
        let s = SemmState {
            u: SplitVector::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap(),
            v: SplitVector::new(vec![5.0], vec![6.0]).unwrap(),
            sigma_re: 7.0,
            sigma_im: 8.0,
            k: 0,
        };
        let w = s.to_vec();
        assert_eq!(w, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(SemmState::from_slice(&w, 2, 1, 0), s);
    }
}
