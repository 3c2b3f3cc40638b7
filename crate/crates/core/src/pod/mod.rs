//! Proper orthogonal decomposition of snapshot matrices by the method of
//! snapshots, and singular value sensitivity fields.

mod io;

pub use io::{
    encode_bin, encode_csv, load_snapshots, parse_bin, parse_csv, save_matrix, SnapshotFormat,
    MAGIC,
};

use crate::error::{Error, Result};
use crate::governing::DEFAULT_GAP_TOL;
use crate::linalg::{dot, sym_eigen, Lu, Matrix};
use crate::scalar::Real;

/// Rank threshold on covariance eigenvalues relative to the largest.
pub const RANK_TOL: f64 = 1e-12;

/// `m` states by `n` snapshots; column `j` is time step `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotMatrix<T> {
    data: Matrix<T>,
}

impl<T: Real> SnapshotMatrix<T> {
    pub fn new(data: Matrix<T>) -> Result<Self> {
        let (m, n) = data.shape();
        if n < 2 || m < n {
            return Err(Error::DimensionMismatch(format!(
                "snapshot matrix must satisfy m >= n >= 2, got {m}x{n}"
            )));
        }
        if !data.is_finite() {
            return Err(Error::NonFinite("snapshot matrix".into()));
        }
        Ok(SnapshotMatrix { data })
    }

    pub fn states(&self) -> usize {
        self.data.rows()
    }

    pub fn snapshots(&self) -> usize {
        self.data.cols()
    }

    pub fn data(&self) -> &Matrix<T> {
        &self.data
    }

    pub fn into_data(self) -> Matrix<T> {
        self.data
    }

    /// Subtracts each row's temporal mean in place.
    pub fn center_in_place(&mut self) {
        let n = self.snapshots();
        let inv = T::one() / T::from_usize(n).unwrap();
        for i in 0..self.states() {
            let row = self.data.row_mut(i);
            let mean = row.iter().copied().sum::<T>() * inv;
            row.iter_mut().for_each(|x| *x -= mean);
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.max_abs()
    }
}

/// `X' = X − (1/n) X 1 1ᵀ`
pub fn center<T: Real>(x: &SnapshotMatrix<T>) -> SnapshotMatrix<T> {
    let mut out = x.clone();
    out.center_in_place();
    out
}

/// Leading POD modes with the full covariance eigensystem kept for probes.
#[derive(Clone, Debug)]
pub struct PodResult<T> {
    /// `m × k`, orthonormal columns.
    pub modes: Matrix<T>,
    pub sigmas: Vec<T>,
    /// `n × k`
    pub right_vectors: Matrix<T>,
    /// `k × n`, row `i` is `vᵢᵀ √λᵢ`.
    pub temporal_coeffs: Matrix<T>,
    /// Every covariance eigenvalue, descending.
    pub eigenvalues: Vec<T>,
    /// `n × n` covariance eigenvectors (columns), sign-matched to the modes.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> PodResult<T> {
    pub fn k(&self) -> usize {
        self.sigmas.len()
    }

    /// `σᵢ²` normalised by the total variance.
    pub fn energy_fractions(&self) -> Vec<T> {
        let total: T = self.eigenvalues.iter().map(|&l| l.max(T::zero())).sum();
        self.sigmas.iter().map(|&s| s * s / total).collect()
    }
}

/// `Xᵀ X`, accumulated one state row at a time.
pub fn covariance<T: Real>(x: &Matrix<T>) -> Matrix<T> {
    let n = x.cols();
    let mut upper = vec![T::zero(); n * n];
    for i in 0..x.rows() {
        let row = x.row(i);
        for a in 0..n {
            let ra = row[a];
            if ra == T::zero() {
                continue;
            }
            let dst = &mut upper[a * n + a..a * n + n];
            for (d, &rb) in dst.iter_mut().zip(&row[a..]) {
                *d += ra * rb;
            }
        }
    }
    Matrix::from_fn(n, n, |a, b| {
        if a <= b {
            upper[a * n + b]
        } else {
            upper[b * n + a]
        }
    })
}

/// POD of an already centred snapshot matrix through the `n × n` covariance
/// eigenproblem.
pub fn method_of_snapshots<T: Real>(xp: &SnapshotMatrix<T>, k: usize) -> Result<PodResult<T>> {
    let (m, n) = (xp.states(), xp.snapshots());
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            index: k,
            available: n,
        });
    }
    let eig = sym_eigen(&covariance(xp.data()))?;
    let lambda = eig.values;
    let mut vecs = eig.vectors;
    let l1 = lambda[0].max(T::zero());
    let floor = T::lit(RANK_TOL) * l1;
    for (i, &l) in lambda.iter().enumerate().take(k) {
        if l.is_nan() || l <= floor {
            return Err(Error::Rank {
                index: i + 1,
                value: l.to_f64_lossy(),
                threshold: floor.to_f64_lossy(),
            });
        }
    }
    let sig_all: Vec<T> = lambda.iter().map(|&l| l.max(T::zero()).sqrt()).collect();
    let gap_floor = T::lit(DEFAULT_GAP_TOL) * sig_all[0];
    for i in 0..k {
        let gap = (0..n)
            .filter(|&j| j != i)
            .map(|j| (sig_all[i] - sig_all[j]).abs())
            .fold(T::infinity(), T::min);
        if gap.is_nan() || gap <= gap_floor {
            return Err(Error::RepeatedSingularValue {
                index: i + 1,
                gap: gap.to_f64_lossy(),
                threshold: gap_floor.to_f64_lossy(),
            });
        }
    }
    let sigmas: Vec<T> = sig_all[..k].to_vec();

    // Φ = X V_k / σ, streamed over state rows
    let vk = Matrix::from_fn(n, k, |r, c| vecs[(r, c)]);
    let mut modes = Matrix::zeros(m, k);
    let inv: Vec<T> = sigmas.iter().map(|&s| T::one() / s).collect();
    let vkt = vk.transpose();
    for i in 0..m {
        let row = xp.data().row(i);
        let out = modes.row_mut(i);
        for c in 0..k {
            out[c] = dot(row, vkt.row(c)) * inv[c];
        }
    }

    for c in 0..k {
        let mut best = 0;
        let mut best_abs = -T::one();
        for i in 0..m {
            let a = modes[(i, c)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if modes[(best, c)] < T::zero() {
            for i in 0..m {
                modes[(i, c)] = -modes[(i, c)];
            }
            for r in 0..n {
                vecs[(r, c)] = -vecs[(r, c)];
            }
        }
    }
    let right_vectors = Matrix::from_fn(n, k, |r, c| vecs[(r, c)]);
    let temporal_coeffs = Matrix::from_fn(k, n, |c, j| vecs[(j, c)] * sigmas[c]);
    Ok(PodResult {
        modes,
        sigmas,
        right_vectors,
        temporal_coeffs,
        eigenvalues: lambda,
        eigenvectors: vecs,
    })
}

fn check_mode<T: Real>(r: &PodResult<T>, i: usize) -> Result<usize> {
    if i == 0 || i > r.k() {
        return Err(Error::IndexOutOfRange {
            index: i,
            available: r.k(),
        });
    }
    Ok(i - 1)
}

/// `dσᵢ/dX' = Φᵢ Ψᵢᵀ`, or `Φᵢ Ψᵢᵀ P` with `P = I − 1 1ᵀ/n` for the raw `X`.
pub fn sigma_sensitivity_field<T: Real>(
    r: &PodResult<T>,
    i: usize,
    chain_centering: bool,
) -> Result<Matrix<T>> {
    let c = check_mode(r, i)?;
    let (m, n) = (r.modes.rows(), r.right_vectors.rows());
    let mut psi = r.right_vectors.col(c);
    if chain_centering {
        let mean = psi.iter().copied().sum::<T>() / T::from_usize(n).unwrap();
        psi.iter_mut().for_each(|x| *x -= mean);
    }
    let mut out = Matrix::zeros(m, n);
    for p in 0..m {
        let phi = r.modes[(p, c)];
        for (o, &s) in out.row_mut(p).iter_mut().zip(&psi) {
            *o = phi * s;
        }
    }
    Ok(out)
}

/// Change of the `i`-th eigenvalue of `C + εK₁ + ε²K₂` written in the
/// covariance eigenbasis, solved as a secular equation so that the result
/// keeps full relative accuracy for small `ε`.
fn eigenvalue_shift<T: Real>(lambda: &[T], a: &[T], b: &[T], eps: T, i: usize) -> Result<T> {
    let n = lambda.len();
    let kmat = |r: usize, c: usize| eps * (a[r] * b[c] + b[r] * a[c]) + eps * eps * b[r] * b[c];
    let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let kvec: Vec<T> = rest.iter().map(|&j| kmat(j, i)).collect();
    let kii = kmat(i, i);
    let mut mu = kii;
    for _ in 0..100 {
        let sys = Matrix::from_fn(rest.len(), rest.len(), |r, c| {
            let (jr, jc) = (rest[r], rest[c]);
            let mut x = kmat(jr, jc);
            if r == c {
                x += lambda[jr] - lambda[i] - mu;
            }
            x
        });
        let y = Lu::factor(&sys)?.solve(&kvec)?;
        let next = kii - dot(&kvec, &y);
        let done = (next - mu).abs() <= T::epsilon() * next.abs().max(T::min_positive_value());
        mu = next;
        if done {
            return Ok(mu);
        }
    }
    Ok(mu)
}

/// Central finite difference of `σᵢ` with respect to entry `(p, q)` (0-based)
/// of `X'` (or of the raw `X` when `chain_centering`), step `eps`.
///
/// `xp` must be the centred matrix `r` was computed from.
pub fn fd_sigma_probe<T: Real>(
    xp: &SnapshotMatrix<T>,
    r: &PodResult<T>,
    i: usize,
    (p, q): (usize, usize),
    eps: T,
    chain_centering: bool,
) -> Result<T> {
    let c = check_mode(r, i)?;
    let n = xp.snapshots();
    if p >= xp.states() || q >= n {
        return Err(Error::IndexOutOfRange {
            index: p.max(q),
            available: xp.states(),
        });
    }
    let mut d = vec![T::zero(); n];
    d[q] = T::one();
    if chain_centering {
        let s = T::one() / T::from_usize(n).unwrap();
        d.iter_mut().for_each(|x| *x -= s);
    }
    let x = xp.data().row(p);
    let vt = r.eigenvectors.transpose();
    let a: Vec<T> = (0..n).map(|j| dot(vt.row(j), x)).collect();
    let b: Vec<T> = (0..n).map(|j| dot(vt.row(j), &d)).collect();
    let lam = r.eigenvalues[c];
    let dsigma = |e: T| -> Result<T> {
        let mu = eigenvalue_shift(&r.eigenvalues, &a, &b, e, c)?;
        Ok(mu / ((lam + mu).sqrt() + lam.sqrt()))
    };
    Ok((dsigma(eps)? - dsigma(-eps)?) / (T::two() * eps))
}
