use super::{Anchor, Formulation, PhaseConvention, Pivot, PivotSign, SingularTriplet};
use crate::error::{Error, Result};
use crate::linalg::{SplitScalar, SplitVector};
use crate::scalar::Real;

/// The unit factor `s = ±conj(x_k)/|x_k|` that makes `x_k` real, with its
/// derivatives with respect to `a = Re x_k` and `b = Im x_k`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseMap<T> {
    pub k: usize,
    pub s: SplitScalar<T>,
    pub ds_da: SplitScalar<T>,
    pub ds_db: SplitScalar<T>,
}

impl<T: Real> PhaseMap<T> {
    /// Cotangent pullback of `y = s·x` for every vector in `xs`, where `s`
    /// depends on entry `k` of `xs[anchor]`. `ybars` hold `∂F/∂y_r + i ∂F/∂y_i`.
    pub fn pullback(
        &self,
        xs: &[&SplitVector<T>],
        ybars: &[&SplitVector<T>],
        anchor: usize,
    ) -> Vec<SplitVector<T>> {
        let sc = self.s.conj();
        let mut z = SplitScalar::new(T::zero(), T::zero());
        let mut out: Vec<SplitVector<T>> = Vec::with_capacity(xs.len());
        for (x, yb) in xs.iter().zip(ybars) {
            z = z + x.hdot(yb);
            out.push(yb.scale(sc));
        }
        let zc = z.conj();
        let ga = (zc * self.ds_da).re;
        let gb = (zc * self.ds_db).re;
        let xb = &mut out[anchor];
        xb.re[self.k] += ga;
        xb.im[self.k] += gb;
        out
    }
}

/// Builds the phase map for pivot `k` of `x` with the requested sign.
pub fn phase_factor<T: Real>(x: &SplitVector<T>, k: usize, sign: PivotSign) -> Result<PhaseMap<T>> {
    let a = x.re[k];
    let b = x.im[k];
    let r = a.hypot(b);
    if r.is_nan() || r < T::lit(1e-14) {
        return Err(Error::DegeneratePivot {
            index: k,
            magnitude: r.to_f64_lossy(),
        });
    }
    let sg = match sign {
        PivotSign::Positive => T::one(),
        PivotSign::Negative => -T::one(),
        PivotSign::Keep => {
            if a >= T::zero() {
                T::one()
            } else {
                -T::one()
            }
        }
    };
    let r3 = r * r * r;
    let w = SplitScalar::new(b, a);
    Ok(PhaseMap {
        k,
        s: SplitScalar::new(sg * a / r, -sg * b / r),
        ds_da: w.scale(sg * b / r3),
        ds_db: w.scale(-sg * a / r3),
    })
}

/// Rotates `(u, v)` by a common phase so the anchored pivot is real with the
/// requested sign.
pub fn enforce_phase<T: Real>(
    t: &SingularTriplet<T>,
    pc: PhaseConvention,
) -> Result<SingularTriplet<T>> {
    let x = match pc.anchor {
        Anchor::Left => &t.u,
        Anchor::Right => &t.v,
    };
    let k = pc.pivot_index(x)?;
    let map = phase_factor(x, k, pc.sign)?;
    let mut u = t.u.scale(map.s);
    let mut v = t.v.scale(map.s);
    let target = match pc.anchor {
        Anchor::Left => &mut u,
        Anchor::Right => &mut v,
    };
    let r = x.re[k].hypot(x.im[k]);
    target.re[k] = if map.s.re * x.re[k] - map.s.im * x.im[k] >= T::zero() {
        r
    } else {
        -r
    };
    target.im[k] = T::zero();
    Ok(SingularTriplet {
        sigma: t.sigma,
        u,
        v,
        convention: pc,
        k,
    })
}

/// Re-anchors `t` on the vector a formulation constrains: `u` for LGMM and
/// SEMM, `v` for RGMM. The pivot is kept when the anchor already matches.
pub fn internal_gauge<T: Real>(
    kind: Formulation,
    t: &SingularTriplet<T>,
) -> Result<SingularTriplet<T>> {
    let anchor = match kind {
        Formulation::Lgmm | Formulation::Semm => Anchor::Left,
        Formulation::Rgmm => Anchor::Right,
    };
    let pivot = if t.convention.anchor == anchor {
        Pivot::Fixed(t.k)
    } else {
        Pivot::ArgMaxAbs
    };
    enforce_phase(t, PhaseConvention::new(anchor, pivot, PivotSign::Keep))
}
