//! Finite-difference oracle for gradient bundles and digit-match reports.

use crate::adjoint::GradientBundle;
use crate::error::{Error, Result};
use crate::governing::{solve_triplet, TripletSpec};
use crate::linalg::SplitMatrix;
use crate::objective::ObjectiveSpec;
use crate::scalar::Real;
use serde::Serialize;

pub const DEFAULT_EPS: f64 = 1e-6;
pub const MAX_DIGITS: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdScheme {
    /// `(f(A + εE) − f(A)) / ε`
    Forward,
    /// `(f(A + εE) − f(A − εE)) / 2ε`
    Central,
}

fn eval_at<T: Real>(
    obj: &ObjectiveSpec<T>,
    a: &SplitMatrix<T>,
    spec: &TripletSpec,
) -> Result<(T, T)> {
    let t = solve_triplet(a, spec)?;
    obj.evaluate(&t.u, &t.v, t.sigma, a)
}

/// Finite-difference bundle: every probe re-solves the SVD and re-anchors the
/// phase with `spec.convention` before evaluating `obj`.
pub fn fd_gradient<T: Real>(
    obj: &ObjectiveSpec<T>,
    a: &SplitMatrix<T>,
    spec: &TripletSpec,
    eps: T,
    scheme: FdScheme,
) -> Result<GradientBundle<T>> {
    let (m, n) = a.shape();
    let base = match scheme {
        FdScheme::Forward => Some(eval_at(obj, a, spec)?),
        FdScheme::Central => None,
    };
    let mut out = GradientBundle::zeros(m, n);
    let mut probe = a.clone();
    for p in 0..m {
        for q in 0..n {
            let wrap = |e: Error| Error::Probe {
                row: p,
                col: q,
                source: Box::new(e),
            };
            for imag in [false, true] {
                let x = if imag { a.im[(p, q)] } else { a.re[(p, q)] };
                let set = |pr: &mut SplitMatrix<T>, val: T| {
                    if imag {
                        pr.im[(p, q)] = val;
                    } else {
                        pr.re[(p, q)] = val;
                    }
                };
                set(&mut probe, x + eps);
                let plus = eval_at(obj, &probe, spec).map_err(wrap)?;
                let (dr, di) = match base {
                    Some((br, bi)) => ((plus.0 - br) / eps, (plus.1 - bi) / eps),
                    None => {
                        set(&mut probe, x - eps);
                        let minus = eval_at(obj, &probe, spec).map_err(wrap)?;
                        let h2 = T::two() * eps;
                        ((plus.0 - minus.0) / h2, (plus.1 - minus.1) / h2)
                    }
                };
                set(&mut probe, x);
                if imag {
                    out.dfr_dai[(p, q)] = dr;
                    out.dfi_dai[(p, q)] = di;
                } else {
                    out.dfr_dar[(p, q)] = dr;
                    out.dfi_dar[(p, q)] = di;
                }
            }
        }
    }
    Ok(out)
}

/// `floor(−log₁₀(|a − b| / max(|a|, |b|, 1e-300)))`, clamped to `[0, 16]`.
pub fn matched_digits(a: f64, b: f64) -> u32 {
    if a == b {
        return MAX_DIGITS;
    }
    let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    if !rel.is_finite() {
        return 0;
    }
    let d = (-rel.log10()).floor();
    if d <= 0.0 {
        0
    } else {
        (d as u32).min(MAX_DIGITS)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitEntry {
    pub block: &'static str,
    /// 1-based row.
    pub i: usize,
    /// 1-based column.
    pub j: usize,
    pub analytic: f64,
    pub fd: f64,
    pub digits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitReport {
    pub min_digits: u32,
    pub entries: Vec<DigitEntry>,
}

impl DigitReport {
    pub fn to_json(&self) -> Result<String> {
        crate::report::to_json_string(self, true)
    }
}

pub fn compare<T: Real>(
    analytic: &GradientBundle<T>,
    fd: &GradientBundle<T>,
) -> Result<DigitReport> {
    if analytic.shape() != fd.shape() {
        return Err(Error::DimensionMismatch(format!(
            "bundles are {:?} and {:?}",
            analytic.shape(),
            fd.shape()
        )));
    }
    let (_, n) = analytic.shape();
    let mut entries = Vec::new();
    for ((name, a), (_, f)) in analytic.blocks().iter().zip(fd.blocks().iter()) {
        for (idx, (&x, &y)) in a.as_slice().iter().zip(f.as_slice()).enumerate() {
            let (x, y) = (x.to_f64_lossy(), y.to_f64_lossy());
            entries.push(DigitEntry {
                block: name,
                i: idx / n + 1,
                j: idx % n + 1,
                analytic: x,
                fd: y,
                digits: matched_digits(x, y),
            });
        }
    }
    let min_digits = entries.iter().map(|e| e.digits).min().unwrap_or(MAX_DIGITS);
    Ok(DigitReport {
        min_digits,
        entries,
    })
}
