//! Complex vectors and matrices stored as separate real and imaginary parts.

use super::matrix::{dot, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul};

/// A complex scalar as a `(re, im)` pair.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SplitScalar<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> SplitScalar<T> {
    pub fn new(re: T, im: T) -> Self {
        SplitScalar { re, im }
    }

    pub fn real(re: T) -> Self {
        SplitScalar { re, im: T::zero() }
    }

    pub fn conj(self) -> Self {
        SplitScalar {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn abs(self) -> T {
        self.re.hypot(self.im)
    }

    pub fn scale(self, s: T) -> Self {
        SplitScalar {
            re: self.re * s,
            im: self.im * s,
        }
    }
}

impl<T: Real> Mul for SplitScalar<T> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        SplitScalar {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl<T: Real> Add for SplitScalar<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        SplitScalar {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

/// Complex vector `re + i·im`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitVector<T> {
    pub re: Vec<T>,
    pub im: Vec<T>,
}

impl<T: Real> SplitVector<T> {
    pub fn new(re: Vec<T>, im: Vec<T>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch(format!(
                "re has {} entries, im has {}",
                re.len(),
                im.len()
            )));
        }
        Ok(SplitVector { re, im })
    }

    pub fn zeros(n: usize) -> Self {
        SplitVector {
            re: vec![T::zero(); n],
            im: vec![T::zero(); n],
        }
    }

    pub fn from_real(re: Vec<T>) -> Self {
        let im = vec![T::zero(); re.len()];
        SplitVector { re, im }
    }

    /// Unit vector `e_k` of length `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.re[k] = T::one();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn get(&self, k: usize) -> SplitScalar<T> {
        SplitScalar::new(self.re[k], self.im[k])
    }

    pub fn set(&mut self, k: usize, z: SplitScalar<T>) {
        self.re[k] = z.re;
        self.im[k] = z.im;
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|x| x.is_finite())
    }

    pub fn norm_sqr(&self) -> T {
        dot(&self.re, &self.re) + dot(&self.im, &self.im)
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `selfᴴ other`.
    pub fn hdot(&self, other: &Self) -> SplitScalar<T> {
        SplitScalar::new(
            dot(&self.re, &other.re) + dot(&self.im, &other.im),
            dot(&self.re, &other.im) - dot(&self.im, &other.re),
        )
    }

    /// Bilinear product `selfᵀ other` (no conjugation).
    pub fn tdot(&self, other: &Self) -> SplitScalar<T> {
        SplitScalar::new(
            dot(&self.re, &other.re) - dot(&self.im, &other.im),
            dot(&self.re, &other.im) + dot(&self.im, &other.re),
        )
    }

    pub fn scale(&self, z: SplitScalar<T>) -> Self {
        SplitVector {
            re: self
                .re
                .iter()
                .zip(&self.im)
                .map(|(&a, &b)| a * z.re - b * z.im)
                .collect(),
            im: self
                .re
                .iter()
                .zip(&self.im)
                .map(|(&a, &b)| a * z.im + b * z.re)
                .collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        SplitVector {
            re: self.re.iter().map(|&x| x * s).collect(),
            im: self.im.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SplitVector {
            re: self
                .re
                .iter()
                .zip(&other.re)
                .map(|(&a, &b)| a + b)
                .collect(),
            im: self
                .im
                .iter()
                .zip(&other.im)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SplitVector {
            re: self
                .re
                .iter()
                .zip(&other.re)
                .map(|(&a, &b)| a - b)
                .collect(),
            im: self
                .im
                .iter()
                .zip(&other.im)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        SplitVector {
            re: self.re.clone(),
            im: self.im.iter().map(|&x| -x).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }

    pub fn max_abs(&self) -> T {
        self.re
            .iter()
            .chain(&self.im)
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Index of the entry with the largest modulus; ties resolve to the smallest index.
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        let mut best_val = T::neg_infinity();
        for k in 0..self.len() {
            let a = self.re[k] * self.re[k] + self.im[k] * self.im[k];
            if a > best_val {
                best_val = a;
                best = k;
            }
        }
        best
    }

    /// Real part followed by imaginary part.
    pub fn stacked(&self) -> Vec<T> {
        let mut out = self.re.clone();
        out.extend_from_slice(&self.im);
        out
    }

    pub fn cast<U: Real>(&self) -> SplitVector<U> {
        SplitVector {
            re: self.re.iter().map(|x| U::lit(x.to_f64_lossy())).collect(),
            im: self.im.iter().map(|x| U::lit(x.to_f64_lossy())).collect(),
        }
    }
}

/// Which Gram matrix / recovery map: `Left` is `A A*` (m×m), `Right` is `A* A` (n×n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Complex matrix `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitMatrix<T> {
    pub re: Matrix<T>,
    pub im: Matrix<T>,
}

impl<T: Real> SplitMatrix<T> {
    pub fn new(re: Matrix<T>, im: Matrix<T>) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::DimensionMismatch(format!(
                "re is {:?}, im is {:?}",
                re.shape(),
                im.shape()
            )));
        }
        Ok(SplitMatrix { re, im })
    }

    pub fn from_real(re: Matrix<T>) -> Self {
        let im = Matrix::zeros(re.rows(), re.cols());
        SplitMatrix { re, im }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SplitMatrix {
            re: Matrix::zeros(rows, cols),
            im: Matrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real(Matrix::identity(n))
    }

    pub fn from_rows(re: &[Vec<T>], im: &[Vec<T>]) -> Result<Self> {
        Self::new(Matrix::from_rows(re)?, Matrix::from_rows(im)?)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.re.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.re.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.re.shape()
    }

    pub fn get(&self, i: usize, j: usize) -> SplitScalar<T> {
        SplitScalar::new(self.re[(i, j)], self.im[(i, j)])
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Conjugate transpose `A*`.
    pub fn adjoint(&self) -> Self {
        SplitMatrix {
            re: self.re.transpose(),
            im: self.im.transpose().scale(-T::one()),
        }
    }

    /// Complex product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        let rr = self.re.matmul(&other.re);
        let ii = self.im.matmul(&other.im);
        let ri = self.re.matmul(&other.im);
        let ir = self.im.matmul(&other.re);
        SplitMatrix {
            re: rr.sub(&ii),
            im: ri.add(&ir),
        }
    }

    /// `A x`
    pub fn matvec(&self, x: &SplitVector<T>) -> SplitVector<T> {
        let rr = self.re.matvec(&x.re);
        let ii = self.im.matvec(&x.im);
        let ri = self.re.matvec(&x.im);
        let ir = self.im.matvec(&x.re);
        SplitVector {
            re: rr.iter().zip(&ii).map(|(&a, &b)| a - b).collect(),
            im: ri.iter().zip(&ir).map(|(&a, &b)| a + b).collect(),
        }
    }

    /// `A* x`
    pub fn adjoint_matvec(&self, x: &SplitVector<T>) -> SplitVector<T> {
        let rr = self.re.tr_matvec(&x.re);
        let ii = self.im.tr_matvec(&x.im);
        let ri = self.re.tr_matvec(&x.im);
        let ir = self.im.tr_matvec(&x.re);
        SplitVector {
            re: rr.iter().zip(&ii).map(|(&a, &b)| a + b).collect(),
            im: ri.iter().zip(&ir).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SplitMatrix {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SplitMatrix {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        SplitMatrix {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        let a = self.re.frobenius_norm();
        let b = self.im.frobenius_norm();
        a.hypot(b)
    }

    pub fn trace(&self) -> SplitScalar<T> {
        SplitScalar::new(self.re.trace(), self.im.trace())
    }

    pub fn cast<U: Real>(&self) -> SplitMatrix<U> {
        SplitMatrix {
            re: self.re.cast(),
            im: self.im.cast(),
        }
    }

    /// Row-major flattening of the real part followed by the imaginary part.
    pub fn vec(&self) -> Vec<T> {
        let mut out = self.re.as_slice().to_vec();
        out.extend_from_slice(self.im.as_slice());
        out
    }

    /// Gram matrix: `A A*` for [`Side::Left`], `A* A` for [`Side::Right`].
    pub fn gram(&self, side: Side) -> Self {
        let (ar, ai) = (&self.re, &self.im);
        match side {
            Side::Left => {
                // B_r = A_r A_rᵀ + A_i A_iᵀ,  B_i = A_i A_rᵀ − A_r A_iᵀ
                let (art, ait) = (ar.transpose(), ai.transpose());
                let re = ar.matmul(&art).add(&ai.matmul(&ait));
                let im = ai.matmul(&art).sub(&ar.matmul(&ait));
                SplitMatrix { re, im }
            }
            Side::Right => {
                // C_r = A_rᵀ A_r + A_iᵀ A_i,  C_i = A_rᵀ A_i − A_iᵀ A_r
                let re = ar.tr_matmul(ar).add(&ai.tr_matmul(ai));
                let im = ar.tr_matmul(ai).sub(&ai.tr_matmul(ar));
                SplitMatrix { re, im }
            }
        }
    }
}

/// Complex outer product `a bᴴ` split into `(re, im)`.
pub fn outer_h<T: Real>(a: &SplitVector<T>, b: &SplitVector<T>) -> SplitMatrix<T> {
    let re = Matrix::outer(&a.re, &b.re).add(&Matrix::outer(&a.im, &b.im));
    let im = Matrix::outer(&a.im, &b.re).sub(&Matrix::outer(&a.re, &b.im));
    SplitMatrix { re, im }
}
