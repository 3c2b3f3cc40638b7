use super::matrix::{norm_inf, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative pivot threshold below which a system is declared singular.
pub const SINGULAR_PIVOT: f64 = 1e-14;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("LU input".into()));
        }
        let n = m.rows();
        let scale = m.inf_norm();
        let tiny = T::lit(SINGULAR_PIVOT) * scale;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best.is_nan() || best <= tiny || best == T::zero() {
                return Err(Error::SingularSystem {
                    column: k,
                    pivot: best.to_f64_lossy(),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} entries, system is {}x{}",
                b.len(),
                n,
                n
            )));
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        Ok(x)
    }
}

/// Solves `M x = b` by LU with partial pivoting.
pub fn lu_solve<T: Real>(m: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    Lu::factor(m)?.solve(b)
}

/// Scaled residual `‖M x − b‖∞ / (‖M‖∞‖x‖∞ + ‖b‖∞)`.
pub fn relative_residual<T: Real>(m: &Matrix<T>, x: &[T], b: &[T]) -> T {
    let r: Vec<T> = m.matvec(x).iter().zip(b).map(|(&a, &c)| a - c).collect();
    let denom = m.inf_norm() * norm_inf(x) + norm_inf(b);
    if denom == T::zero() {
        norm_inf(&r)
    } else {
        norm_inf(&r) / denom
    }
}
