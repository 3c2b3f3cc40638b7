//! One-sided (Hestenes) Jacobi SVD for split-complex matrices.

use super::split::{SplitMatrix, SplitVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Thin SVD `A = U Σ V*` with singular values in descending order.
#[derive(Clone, Debug)]
pub struct SvdResult<T> {
    pub sigma: Vec<T>,
    pub u: Vec<SplitVector<T>>,
    pub v: Vec<SplitVector<T>>,
    pub rank_tol: T,
}

impl<T: Real> SvdResult<T> {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Number of singular values above `rank_tol`.
    pub fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > self.rank_tol).count()
    }

    /// `U Σ V*`
    pub fn reconstruct(&self) -> SplitMatrix<T> {
        let m = self.u.first().map_or(0, SplitVector::len);
        let n = self.v.first().map_or(0, SplitVector::len);
        let mut out = SplitMatrix::zeros(m, n);
        for ((s, u), v) in self.sigma.iter().zip(&self.u).zip(&self.v) {
            let t = super::split::outer_h(u, v).scale_real(*s);
            out = out.add(&t);
        }
        out
    }
}

struct Columns<T> {
    re: Vec<Vec<T>>,
    im: Vec<Vec<T>>,
}

impl<T: Real> Columns<T> {
    fn of(a: &SplitMatrix<T>) -> Self {
        Columns {
            re: (0..a.cols()).map(|j| a.re.col(j)).collect(),
            im: (0..a.cols()).map(|j| a.im.col(j)).collect(),
        }
    }

    fn identity(n: usize) -> Self {
        let mut re = vec![vec![T::zero(); n]; n];
        for (j, c) in re.iter_mut().enumerate() {
            c[j] = T::one();
        }
        Columns {
            re,
            im: vec![vec![T::zero(); n]; n],
        }
    }

    fn norm_sqr(&self, j: usize) -> T {
        self.re[j].iter().chain(&self.im[j]).map(|&x| x * x).sum()
    }

    /// `a_pᴴ a_q`
    fn hdot(&self, p: usize, q: usize) -> (T, T) {
        let (pr, pi, qr, qi) = (&self.re[p], &self.im[p], &self.re[q], &self.im[q]);
        let mut re = T::zero();
        let mut im = T::zero();
        for k in 0..pr.len() {
            re += pr[k] * qr[k] + pi[k] * qi[k];
            im += pr[k] * qi[k] - pi[k] * qr[k];
        }
        (re, im)
    }

    /// `a_p ← c a_p − s e^{-iφ} a_q`, `a_q ← s a_p + c e^{-iφ} a_q`.
    fn rotate(&mut self, p: usize, q: usize, c: T, s: T, cphi: T, sphi: T) {
        let len = self.re[p].len();
        for k in 0..len {
            let (xr, xi) = (self.re[p][k], self.im[p][k]);
            let (yr0, yi0) = (self.re[q][k], self.im[q][k]);
            let yr = cphi * yr0 + sphi * yi0;
            let yi = cphi * yi0 - sphi * yr0;
            self.re[p][k] = c * xr - s * yr;
            self.im[p][k] = c * xi - s * yi;
            self.re[q][k] = s * xr + c * yr;
            self.im[q][k] = s * xi + c * yi;
        }
    }
}

/// Computes the thin SVD of `a` by one-sided complex Jacobi rotations.
///
/// Vectors come back with an arbitrary phase; see `governing::enforce_phase`.
pub fn jacobi_svd<T: Real>(a: &SplitMatrix<T>) -> Result<SvdResult<T>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input".into()));
    }
    if a.rows() < a.cols() {
        let r = jacobi_svd(&a.adjoint())?;
        return Ok(SvdResult {
            sigma: r.sigma,
            u: r.v,
            v: r.u,
            rank_tol: r.rank_tol,
        });
    }

    let n = a.cols();
    let mut w = Columns::of(a);
    let mut vv = Columns::identity(n);
    let eps = T::epsilon();

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.norm_sqr(p);
                let beta = w.norm_sqr(q);
                let (gr, gi) = w.hdot(p, q);
                let g = gr.hypot(gi);
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (cphi, sphi) = (gr / g, gi / g);
                let zeta = (beta - alpha) / (T::two() * g);
                let sgn = if zeta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sgn / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                w.rotate(p, q, c, s, cphi, sphi);
                vv.rotate(p, q, c, s, cphi, sphi);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: MAX_SWEEPS,
            residual: f64::NAN,
        });
    }

    let norms: Vec<T> = (0..n).map(|j| w.norm_sqr(j).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let rank_tol = T::lit(RANK_TOL) * sigma[0];
    let m = a.rows();
    let mut u: Vec<SplitVector<T>> = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for &j in &order {
        v.push(SplitVector {
            re: vv.re[j].clone(),
            im: vv.im[j].clone(),
        });
        let s = norms[j];
        if s > rank_tol && s > T::zero() {
            u.push(SplitVector {
                re: w.re[j].iter().map(|&x| x / s).collect(),
                im: w.im[j].iter().map(|&x| x / s).collect(),
            });
        } else {
            u.push(complete_basis(&u, m));
        }
    }
    Ok(SvdResult {
        sigma,
        u,
        v,
        rank_tol,
    })
}

/// A unit vector orthogonal to every vector in `basis` (Gram-Schmidt on `e_i`).
fn complete_basis<T: Real>(basis: &[SplitVector<T>], m: usize) -> SplitVector<T> {
    let mut best = SplitVector::basis(m, 0);
    let mut best_norm = -T::one();
    for i in 0..m {
        let mut x = SplitVector::basis(m, i);
        for _ in 0..2 {
            for b in basis {
                let c = b.hdot(&x);
                x = x.sub(&b.scale(c));
            }
        }
        let nx = x.norm();
        if nx > best_norm {
            best_norm = nx;
            best = x.scale_real(T::one() / nx);
        }
        if nx > T::half() {
            break;
        }
    }
    best
}
