use super::{Formulation, GmmState, SemmState};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Side, SplitMatrix};
use crate::scalar::Real;

/// Either governing state.
#[derive(Clone, Debug, PartialEq)]
pub enum State<T> {
    Gmm(GmmState<T>),
    Semm(SemmState<T>),
}

/// Stacked real residual of the chosen formulation; Gram matrices are formed here.
pub fn residual<T: Real>(
    kind: Formulation,
    a: &SplitMatrix<T>,
    state: &State<T>,
) -> Result<Vec<T>> {
    match (kind, state) {
        (Formulation::Lgmm, State::Gmm(s)) => gmm_residual(&a.gram(Side::Left), s),
        (Formulation::Rgmm, State::Gmm(s)) => gmm_residual(&a.gram(Side::Right), s),
        (Formulation::Semm, State::Semm(s)) => semm_residual(a, s),
        _ => Err(Error::Config(format!("state does not belong to {kind}"))),
    }
}

/// `[D_r φ_r − D_i φ_i − λ_r φ_r + λ_i φ_i; D_i φ_r + D_r φ_i − λ_i φ_r − λ_r φ_i; φᴴφ − 1; φ_i[k]]`
pub fn gmm_residual<T: Real>(d: &SplitMatrix<T>, s: &GmmState<T>) -> Result<Vec<T>> {
    let p = s.phi.len();
    if d.shape() != (p, p) {
        return Err(Error::DimensionMismatch(format!(
            "Gram matrix is {:?}, eigenvector has {} entries",
            d.shape(),
            p
        )));
    }
    if s.k >= p {
        return Err(Error::IndexOutOfRange {
            index: s.k,
            available: p,
        });
    }
    let (pr, pi) = (&s.phi.re, &s.phi.im);
    let (lr, li) = (s.lambda_re, s.lambda_im);
    let dp = d.matvec(&s.phi);
    let mut r = Vec::with_capacity(2 * p + 2);
    for j in 0..p {
        r.push(dp.re[j] - lr * pr[j] + li * pi[j]);
    }
    for j in 0..p {
        r.push(dp.im[j] - li * pr[j] - lr * pi[j]);
    }
    r.push(s.phi.norm_sqr() - T::one());
    r.push(pi[s.k]);
    Ok(r)
}

/// `∂r/∂w` of [`gmm_residual`], size `2p + 2`.
pub fn gmm_jacobian<T: Real>(d: &SplitMatrix<T>, s: &GmmState<T>) -> Matrix<T> {
    let p = s.phi.len();
    let (pr, pi) = (&s.phi.re, &s.phi.im);
    let (lr, li) = (s.lambda_re, s.lambda_im);
    let mut m = Matrix::zeros(2 * p + 2, 2 * p + 2);
    for i in 0..p {
        for j in 0..p {
            let (dr, di) = (d.re[(i, j)], d.im[(i, j)]);
            m[(i, j)] = dr;
            m[(i, p + j)] = -di;
            m[(p + i, j)] = di;
            m[(p + i, p + j)] = dr;
        }
        m[(i, i)] -= lr;
        m[(i, p + i)] += li;
        m[(p + i, i)] -= li;
        m[(p + i, p + i)] -= lr;
        m[(i, 2 * p)] = -pr[i];
        m[(i, 2 * p + 1)] = pi[i];
        m[(p + i, 2 * p)] = -pi[i];
        m[(p + i, 2 * p + 1)] = -pr[i];
        m[(2 * p, i)] = T::two() * pr[i];
        m[(2 * p, p + i)] = T::two() * pi[i];
    }
    m[(2 * p + 1, p + s.k)] = T::one();
    m
}

fn check_semm<T: Real>(a: &SplitMatrix<T>, s: &SemmState<T>) -> Result<()> {
    if s.u.len() != a.rows() || s.v.len() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {:?}, state has u of {} and v of {}",
            a.shape(),
            s.u.len(),
            s.v.len()
        )));
    }
    if s.k >= a.rows() {
        return Err(Error::IndexOutOfRange {
            index: s.k,
            available: a.rows(),
        });
    }
    Ok(())
}

/// `[A v − σ u (re, im); A* u − σ v (re, im); uᴴu − 1; u_i[k]]` with complex `σ`.
pub fn semm_residual<T: Real>(a: &SplitMatrix<T>, s: &SemmState<T>) -> Result<Vec<T>> {
    check_semm(a, s)?;
    let (m, n) = a.shape();
    let (sr, si) = (s.sigma_re, s.sigma_im);
    let av = a.matvec(&s.v);
    let ahu = a.adjoint_matvec(&s.u);
    let mut r = Vec::with_capacity(2 * m + 2 * n + 2);
    for j in 0..m {
        r.push(av.re[j] - sr * s.u.re[j] + si * s.u.im[j]);
    }
    for j in 0..m {
        r.push(av.im[j] - sr * s.u.im[j] - si * s.u.re[j]);
    }
    for j in 0..n {
        r.push(ahu.re[j] - sr * s.v.re[j] + si * s.v.im[j]);
    }
    for j in 0..n {
        r.push(ahu.im[j] - sr * s.v.im[j] - si * s.v.re[j]);
    }
    r.push(s.u.norm_sqr() - T::one());
    r.push(s.u.im[s.k]);
    Ok(r)
}

/// `∂r/∂w` of [`semm_residual`], size `2m + 2n + 2`.
pub fn semm_jacobian<T: Real>(a: &SplitMatrix<T>, s: &SemmState<T>) -> Matrix<T> {
    let (m, n) = a.shape();
    let (sr, si) = (s.sigma_re, s.sigma_im);
    let (ur, ui, vr, vi) = (&s.u.re, &s.u.im, &s.v.re, &s.v.im);
    let size = 2 * m + 2 * n + 2;
    let (c_ur, c_ui, c_vr, c_vi, c_sr, c_si) =
        (0, m, 2 * m, 2 * m + n, 2 * m + 2 * n, 2 * m + 2 * n + 1);
    let (r1, r2, r3, r4) = (0, m, 2 * m, 2 * m + n);
    let mut j = Matrix::zeros(size, size);
    for i in 0..m {
        j[(r1 + i, c_ur + i)] = -sr;
        j[(r1 + i, c_ui + i)] = si;
        j[(r2 + i, c_ur + i)] = -si;
        j[(r2 + i, c_ui + i)] = -sr;
        for q in 0..n {
            let (ar, ai) = (a.re[(i, q)], a.im[(i, q)]);
            j[(r1 + i, c_vr + q)] = ar;
            j[(r1 + i, c_vi + q)] = -ai;
            j[(r2 + i, c_vr + q)] = ai;
            j[(r2 + i, c_vi + q)] = ar;
            j[(r3 + q, c_ur + i)] = ar;
            j[(r3 + q, c_ui + i)] = ai;
            j[(r4 + q, c_ur + i)] = -ai;
            j[(r4 + q, c_ui + i)] = ar;
        }
        j[(r1 + i, c_sr)] = -ur[i];
        j[(r1 + i, c_si)] = ui[i];
        j[(r2 + i, c_sr)] = -ui[i];
        j[(r2 + i, c_si)] = -ur[i];
        j[(size - 2, c_ur + i)] = T::two() * ur[i];
        j[(size - 2, c_ui + i)] = T::two() * ui[i];
    }
    for q in 0..n {
        j[(r3 + q, c_vr + q)] = -sr;
        j[(r3 + q, c_vi + q)] = si;
        j[(r4 + q, c_vr + q)] = -si;
        j[(r4 + q, c_vi + q)] = -sr;
        j[(r3 + q, c_sr)] = -vr[q];
        j[(r3 + q, c_si)] = vi[q];
        j[(r4 + q, c_sr)] = -vi[q];
        j[(r4 + q, c_si)] = -vr[q];
    }
    j[(size - 1, c_ui + s.k)] = T::one();
    j
}
