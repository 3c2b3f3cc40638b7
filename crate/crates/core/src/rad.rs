//! Closed-form reverse-mode formulas for singular values and the recovery maps
//! `u = A v / σ`, `v = A* u / σ`.

use crate::adjoint::GradientBundle;
use crate::error::{Error, Result};
use crate::governing::SingularTriplet;
use crate::linalg::{Matrix, Side, SplitVector};
use crate::scalar::Real;

/// `dσ/dA_r = u_r v_rᵀ + u_i v_iᵀ`, `dσ/dA_i = −u_r v_iᵀ + u_i v_rᵀ`.
pub fn sigma_grad_complex<T: Real>(t: &SingularTriplet<T>) -> (Matrix<T>, Matrix<T>) {
    let (u, v) = (&t.u, &t.v);
    let gr = Matrix::outer(&u.re, &v.re).add(&Matrix::outer(&u.im, &v.im));
    let gi = Matrix::outer(&u.im, &v.re).sub(&Matrix::outer(&u.re, &v.im));
    (gr, gi)
}

/// `dσ/dA = u vᵀ` for real singular vectors.
pub fn sigma_grad_real<T: Real>(u: &[T], v: &[T]) -> Matrix<T> {
    Matrix::outer(u, v)
}

/// The σ gradient as a four-block bundle (imaginary output blocks are zero).
pub fn sigma_bundle<T: Real>(t: &SingularTriplet<T>) -> GradientBundle<T> {
    let (gr, gi) = sigma_grad_complex(t);
    let z = Matrix::zeros(gr.rows(), gr.cols());
    GradientBundle {
        dfr_dar: gr,
        dfr_dai: gi,
        dfi_dar: z.clone(),
        dfi_dai: z,
    }
}

/// Single complex gradient `½(∂/∂A_r − i ∂/∂A_i)` applied to `f_r + i f_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGradient<T> {
    pub re: Matrix<T>,
    pub im: Matrix<T>,
}

impl<T: Real> ComplexGradient<T> {
    /// Recovers `(dσ/dA_r, dσ/dA_i)` from the gradient of a real function.
    pub fn to_real_blocks(&self) -> (Matrix<T>, Matrix<T>) {
        (self.re.scale(T::two()), self.im.scale(-T::two()))
    }
}

/// `½(df_r/dA_r + i df_i/dA_r − i df_r/dA_i + df_i/dA_i)`
pub fn wirtinger_combine<T: Real>(b: &GradientBundle<T>) -> ComplexGradient<T> {
    let h = T::half();
    ComplexGradient {
        re: b.dfr_dar.add(&b.dfi_dai).scale(h),
        im: b.dfi_dar.sub(&b.dfr_dai).scale(h),
    }
}

/// Pullback of `u = A v / σ` seeded with `ū` (`Side::Left`), or of
/// `v = A* u / σ` seeded with `v̄` (`Side::Right`). Seeds are complex
/// cotangents `∂F/∂x_r + i ∂F/∂x_i`; returns `(Ā_r, Ā_i)`.
pub fn recovery_pullback<T: Real>(
    side: Side,
    seed: &SplitVector<T>,
    t: &SingularTriplet<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    if t.sigma.is_nan() || t.sigma <= T::epsilon() {
        return Err(Error::NearZeroSigma {
            sigma: t.sigma.to_f64_lossy(),
            tolerance: T::epsilon().to_f64_lossy(),
        });
    }
    let inv = T::one() / t.sigma;
    let (ar, ai) = match side {
        Side::Left => {
            if seed.len() != t.u.len() {
                return Err(Error::DimensionMismatch("seed must match u".into()));
            }
            let (ub, v) = (seed, &t.v);
            (
                Matrix::outer(&ub.re, &v.re).add(&Matrix::outer(&ub.im, &v.im)),
                Matrix::outer(&ub.im, &v.re).sub(&Matrix::outer(&ub.re, &v.im)),
            )
        }
        Side::Right => {
            if seed.len() != t.v.len() {
                return Err(Error::DimensionMismatch("seed must match v".into()));
            }
            let (u, vb) = (&t.u, seed);
            (
                Matrix::outer(&u.re, &vb.re).add(&Matrix::outer(&u.im, &vb.im)),
                Matrix::outer(&u.im, &vb.re).sub(&Matrix::outer(&u.re, &vb.im)),
            )
        }
    };
    Ok((ar.scale(inv), ai.scale(inv)))
}
