//! Cyclic Jacobi eigensolver for real symmetric and complex Hermitian matrices.

use super::matrix::Matrix;
use super::split::SplitMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `S = V diag(λ) Vᵀ`, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// Eigenvectors stored as columns.
    pub vectors: Matrix<T>,
}

/// Eigen-decomposition of a real symmetric matrix (only the upper triangle is read).
pub fn sym_eigen<T: Real>(s: &Matrix<T>) -> Result<SymEigen<T>> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.is_finite() {
        return Err(Error::NonFinite("eigen input".into()));
    }
    let n = s.rows();
    let mut a = Matrix::from_fn(n, n, |i, j| if i <= j { s[(i, j)] } else { s[(j, i)] });
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off == T::zero() {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                if apq == T::zero() {
                    continue;
                }
                if apq.abs() <= eps * (app * aqq).abs().sqrt() {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (T::two() * apq);
                let sgn = if theta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sgn / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
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

    let diag: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap().then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, descending, via the real embedding
/// `[[H_r, −H_i], [H_i, H_r]]` whose spectrum repeats each eigenvalue twice.
pub fn hermitian_eigenvalues<T: Real>(h: &SplitMatrix<T>) -> Result<Vec<T>> {
    let n = h.rows();
    let mut big = Matrix::zeros(2 * n, 2 * n);
    big.set_block(0, 0, &h.re);
    big.set_block(n, n, &h.re);
    big.set_block(0, n, &h.im.scale(-T::one()));
    big.set_block(n, 0, &h.im);
    let e = sym_eigen(&big)?;
    Ok(e.values.iter().step_by(2).copied().collect())
}
