//! Adjoint systems for the three formulations and the total gradient of an
//! objective with respect to `A = A_r + i A_i`.

use crate::error::{Error, Result};
use crate::governing::{
    gmm_jacobian, gmm_residual, internal_gauge, phase_factor, semm_jacobian, semm_residual, Anchor,
    Formulation, GmmState, PivotSign, SemmState, SingularTriplet,
};
use crate::linalg::{norm_inf, Lu, Matrix, Side, SplitMatrix, SplitVector};
use crate::objective::{ObjectiveSpec, StatePartials};
use crate::rad::recovery_pullback;
use crate::scalar::Real;

/// Relative tolerance on the governing residual accepted by [`assemble`].
pub const STALE_TOL: f64 = 1e-11;
/// Floor on the stale tolerance, in machine epsilons.
const STALE_ULPS: f64 = 4.5e4;

/// `df_r/dA_r`, `df_r/dA_i`, `df_i/dA_r`, `df_i/dA_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientBundle<T> {
    pub dfr_dar: Matrix<T>,
    pub dfr_dai: Matrix<T>,
    pub dfi_dar: Matrix<T>,
    pub dfi_dai: Matrix<T>,
}

impl<T: Real> GradientBundle<T> {
    pub const NAMES: [&'static str; 4] = ["dfr_dAr", "dfr_dAi", "dfi_dAr", "dfi_dAi"];

    pub fn zeros(m: usize, n: usize) -> Self {
        let z = Matrix::zeros(m, n);
        GradientBundle {
            dfr_dar: z.clone(),
            dfr_dai: z.clone(),
            dfi_dar: z.clone(),
            dfi_dai: z,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.dfr_dar.shape()
    }

    pub fn blocks(&self) -> [(&'static str, &Matrix<T>); 4] {
        [
            (Self::NAMES[0], &self.dfr_dar),
            (Self::NAMES[1], &self.dfr_dai),
            (Self::NAMES[2], &self.dfi_dar),
            (Self::NAMES[3], &self.dfi_dai),
        ]
    }

    fn zip(&self, other: &Self, f: impl Fn(&Matrix<T>, &Matrix<T>) -> Matrix<T>) -> Self {
        GradientBundle {
            dfr_dar: f(&self.dfr_dar, &other.dfr_dar),
            dfr_dai: f(&self.dfr_dai, &other.dfr_dai),
            dfi_dar: f(&self.dfi_dar, &other.dfi_dar),
            dfi_dai: f(&self.dfi_dai, &other.dfi_dai),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, Matrix::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, Matrix::sub)
    }

    pub fn scale(&self, s: T) -> Self {
        self.zip(self, |a, _| a.scale(s))
    }

    pub fn max_abs(&self) -> T {
        self.blocks()
            .iter()
            .fold(T::zero(), |m, (_, b)| m.max(b.max_abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|(_, b)| b.is_finite())
    }

    /// Largest entrywise `|a − b| / max(|a|, |b|, floor)`.
    pub fn max_rel_diff(&self, other: &Self, floor: T) -> T {
        let mut worst = T::zero();
        for ((_, a), (_, b)) in self.blocks().iter().zip(other.blocks().iter()) {
            for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
                let d = (x - y).abs() / x.abs().max(y.abs()).max(floor);
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn cast<U: Real>(&self) -> GradientBundle<U> {
        GradientBundle {
            dfr_dar: self.dfr_dar.cast(),
            dfr_dai: self.dfr_dai.cast(),
            dfi_dar: self.dfi_dar.cast(),
            dfi_dai: self.dfi_dai.cast(),
        }
    }
}

/// Solution `ψ` of an adjoint system with named blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointVector<T> {
    pub kind: Formulation,
    /// `(m, n)` of the source matrix.
    pub dims: (usize, usize),
    pub data: Vec<T>,
}

impl<T: Real> AdjointVector<T> {
    fn layout(&self) -> Vec<(&'static str, usize)> {
        let (m, n) = self.dims;
        match self.kind {
            Formulation::Lgmm => vec![
                ("psi_main_r", m),
                ("psi_main_i", m),
                ("psi_m", 1),
                ("psi_p", 1),
            ],
            Formulation::Rgmm => vec![
                ("psi_main_r", n),
                ("psi_main_i", n),
                ("psi_m", 1),
                ("psi_p", 1),
            ],
            Formulation::Semm => vec![
                ("psi_v_r", m),
                ("psi_v_i", m),
                ("psi_u_r", n),
                ("psi_u_i", n),
                ("psi_m", 1),
                ("psi_p", 1),
            ],
        }
    }

    pub fn blocks(&self) -> Vec<(&'static str, &[T])> {
        let mut out = Vec::new();
        let mut at = 0;
        for (name, len) in self.layout() {
            out.push((name, &self.data[at..at + len]));
            at += len;
        }
        out
    }

    pub fn block(&self, name: &str) -> Option<&[T]> {
        self.blocks()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| b)
    }

    fn nth(&self, i: usize) -> &[T] {
        self.blocks()[i].1
    }
}

fn system_size(kind: Formulation, (m, n): (usize, usize)) -> usize {
    match kind {
        Formulation::Lgmm => 2 * m + 2,
        Formulation::Rgmm => 2 * n + 2,
        Formulation::Semm => 2 * m + 2 * n + 2,
    }
}

/// Jacobian `∂r/∂w` of the formulation at `t`, with the triplet re-anchored
/// on the vector the formulation constrains. Fails if `t` no longer solves
/// the governing equations.
pub fn assemble<T: Real>(
    kind: Formulation,
    a: &SplitMatrix<T>,
    t: &SingularTriplet<T>,
) -> Result<Matrix<T>> {
    if t.dims() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "triplet is {:?}, matrix is {:?}",
            t.dims(),
            a.shape()
        )));
    }
    let ti = internal_gauge(kind, t)?;
    let tol = T::lit(STALE_TOL).max(T::epsilon() * T::lit(STALE_ULPS));
    let s2 = ti.sigma * ti.sigma;
    match kind {
        Formulation::Lgmm | Formulation::Rgmm => {
            let side = if kind == Formulation::Lgmm {
                Side::Left
            } else {
                Side::Right
            };
            let d = a.gram(side);
            let state = GmmState::from_triplet(kind, &ti)?;
            let r = norm_inf(&gmm_residual(&d, &state)?);
            let limit = tol * T::one().max(s2);
            if r.is_nan() || r >= limit {
                return Err(Error::StaleTriplet {
                    residual: r.to_f64_lossy(),
                    tolerance: limit.to_f64_lossy(),
                });
            }
            Ok(gmm_jacobian(&d, &state))
        }
        Formulation::Semm => {
            let state = SemmState::from_triplet(&ti)?;
            let r = norm_inf(&semm_residual(a, &state)?);
            let limit = tol * T::one().max(ti.sigma);
            if r.is_nan() || r >= limit {
                return Err(Error::StaleTriplet {
                    residual: r.to_f64_lossy(),
                    tolerance: limit.to_f64_lossy(),
                });
            }
            Ok(semm_jacobian(a, &state))
        }
    }
}

/// Factored `Mᵀ`, reusable for the `f_r` and `f_i` right-hand sides.
pub struct AdjointSystem<T> {
    kind: Formulation,
    dims: (usize, usize),
    mt: Matrix<T>,
    lu: Lu<T>,
}

impl<T: Real> AdjointSystem<T> {
    pub fn new(kind: Formulation, dims: (usize, usize), m: &Matrix<T>) -> Result<Self> {
        let size = system_size(kind, dims);
        if m.shape() != (size, size) {
            return Err(Error::DimensionMismatch(format!(
                "{kind} system for {dims:?} needs {size}x{size}, got {:?}",
                m.shape()
            )));
        }
        let mt = m.transpose();
        let lu = Lu::factor(&mt)?;
        Ok(AdjointSystem { kind, dims, mt, lu })
    }

    /// Solves `Mᵀ ψ = rhs` with one step of iterative refinement.
    pub fn solve(&self, rhs: &[T]) -> Result<AdjointVector<T>> {
        let mut x = self.lu.solve(rhs)?;
        let r: Vec<T> = self
            .mt
            .matvec(&x)
            .iter()
            .zip(rhs)
            .map(|(&a, &b)| b - a)
            .collect();
        let dx = self.lu.solve(&r)?;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        Ok(AdjointVector {
            kind: self.kind,
            dims: self.dims,
            data: x,
        })
    }
}

/// Solves `Mᵀ ψ = rhs` for a system built by [`assemble`].
pub fn solve_adjoint<T: Real>(
    kind: Formulation,
    dims: (usize, usize),
    m: &Matrix<T>,
    rhs: &[T],
) -> Result<AdjointVector<T>> {
    AdjointSystem::new(kind, dims, m)?.solve(rhs)
}

/// `(ψᵀ ∂r/∂D_r, ψᵀ ∂r/∂D_i)` for the Gram matrix `D = B` (LGMM) or `D = C` (RGMM).
pub fn gram_pullback<T: Real>(
    psi: &AdjointVector<T>,
    t: &SingularTriplet<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let phi = match psi.kind {
        Formulation::Lgmm => &t.u,
        Formulation::Rgmm => &t.v,
        Formulation::Semm => {
            return Err(Error::Config(
                "gram pullback needs an LGMM or RGMM adjoint".into(),
            ));
        }
    };
    let (p1, p2) = (psi.nth(0), psi.nth(1));
    let dr = Matrix::outer(p1, &phi.re).add(&Matrix::outer(p2, &phi.im));
    let di = Matrix::outer(p2, &phi.re).sub(&Matrix::outer(p1, &phi.im));
    Ok((dr, di))
}

/// Chains `(D̄_r, D̄_i)` through `B = A A*` (LGMM) or `C = A* A` (RGMM) to `(Ā_r, Ā_i)`.
pub fn gram_chain_to_a<T: Real>(
    kind: Formulation,
    bar: (&Matrix<T>, &Matrix<T>),
    a: &SplitMatrix<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let (br, bi) = bar;
    let (ar, ai) = (&a.re, &a.im);
    let sym = br.add(&br.transpose());
    let anti = bi.sub(&bi.transpose());
    match kind {
        Formulation::Lgmm => {
            if br.shape() != (a.rows(), a.rows()) {
                return Err(Error::DimensionMismatch("B̄ must be m×m".into()));
            }
            Ok((
                sym.matmul(ar).sub(&anti.matmul(ai)),
                sym.matmul(ai).add(&anti.matmul(ar)),
            ))
        }
        Formulation::Rgmm => {
            if br.shape() != (a.cols(), a.cols()) {
                return Err(Error::DimensionMismatch("C̄ must be n×n".into()));
            }
            Ok((
                ar.matmul(&sym).sub(&ai.matmul(&anti)),
                ai.matmul(&sym).add(&ar.matmul(&anti)),
            ))
        }
        Formulation::Semm => Err(Error::Config("SEMM has no Gram matrix".into())),
    }
}

/// `(ψᵀ ∂r/∂A_r, ψᵀ ∂r/∂A_i)` for the SEMM residual.
pub fn semm_pullback<T: Real>(
    psi: &AdjointVector<T>,
    t: &SingularTriplet<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    if psi.kind != Formulation::Semm {
        return Err(Error::Config("SEMM pullback needs a SEMM adjoint".into()));
    }
    let (p1, p2, p3, p4) = (psi.nth(0), psi.nth(1), psi.nth(2), psi.nth(3));
    let (u, v) = (&t.u, &t.v);
    let ar = Matrix::outer(p1, &v.re)
        .add(&Matrix::outer(p2, &v.im))
        .add(&Matrix::outer(&u.re, p3))
        .add(&Matrix::outer(&u.im, p4));
    let ai = Matrix::outer(p2, &v.re)
        .sub(&Matrix::outer(p1, &v.im))
        .add(&Matrix::outer(&u.im, p3))
        .sub(&Matrix::outer(&u.re, p4));
    Ok((ar, ai))
}

/// Moves state cotangents given at `t` (in its own gauge) onto the internal
/// gauge `ti` of a formulation by pulling back through the phase map `ti → t`.
fn to_internal_gauge<T: Real>(
    t: &SingularTriplet<T>,
    ti: &SingularTriplet<T>,
    bar: &StatePartials<T>,
) -> Result<StatePartials<T>> {
    let (x, idx) = match t.convention.anchor {
        Anchor::Left => (&ti.u, 0),
        Anchor::Right => (&ti.v, 1),
    };
    let sign = if t.anchored().re[t.k] >= T::zero() {
        PivotSign::Positive
    } else {
        PivotSign::Negative
    };
    let map = phase_factor(x, t.k, sign)?;
    let mut out = map.pullback(&[&ti.u, &ti.v], &[&bar.u, &bar.v], idx);
    let v = out.pop().unwrap();
    let u = out.pop().unwrap();
    Ok(StatePartials {
        u,
        v,
        sigma: bar.sigma,
    })
}

/// Total `(df/dA_r, df/dA_i)` for one real output.
fn one_output<T: Real>(
    kind: Formulation,
    a: &SplitMatrix<T>,
    ti: &SingularTriplet<T>,
    sys: &AdjointSystem<T>,
    bar: &StatePartials<T>,
    direct: (&Matrix<T>, &Matrix<T>),
) -> Result<(Matrix<T>, Matrix<T>)> {
    let sigma = ti.sigma;
    let (mut gr, mut gi) = (direct.0.clone(), direct.1.clone());
    match kind {
        Formulation::Semm => {
            let psi = sys.solve(&bar.to_semm_vec())?;
            let (pr, pi) = semm_pullback(&psi, ti)?;
            gr = gr.sub(&pr);
            gi = gi.sub(&pi);
        }
        Formulation::Lgmm | Formulation::Rgmm => {
            // eliminate the dependent vector through u = A v / σ or v = A* u / σ
            let (own_bar, other, other_bar, side) = match kind {
                Formulation::Lgmm => (&bar.u, &ti.v, &bar.v, Side::Right),
                _ => (&bar.v, &ti.u, &bar.u, Side::Left),
            };
            let back = match kind {
                Formulation::Lgmm => a.matvec(other_bar),
                _ => a.adjoint_matvec(other_bar),
            };
            let phi_bar: SplitVector<T> = own_bar.add(&back.scale_real(T::one() / sigma));
            let sigma_bar = bar.sigma - other_bar.hdot(other).re / sigma;
            let (rr, ri) = recovery_pullback(side, other_bar, ti)?;
            let mut rhs = phi_bar.stacked();
            rhs.push(sigma_bar / (T::two() * sigma));
            rhs.push(T::zero());
            let psi = sys.solve(&rhs)?;
            let (dr, di) = gram_pullback(&psi, ti)?;
            let (cr, ci) = gram_chain_to_a(kind, (&dr, &di), a)?;
            gr = gr.add(&rr).sub(&cr);
            gi = gi.add(&ri).sub(&ci);
        }
    }
    Ok((gr, gi))
}

/// Total derivative of `obj` evaluated at triplet `t` of `a`, by the chosen
/// formulation. The objective sees `(u, v)` in the gauge of `t`.
pub fn total_gradient<T: Real>(
    method: Formulation,
    a: &SplitMatrix<T>,
    t: &SingularTriplet<T>,
    obj: &ObjectiveSpec<T>,
) -> Result<GradientBundle<T>> {
    let partials = obj.state_partials(&t.u, &t.v, t.sigma, a)?;
    let direct = obj.a_partials(&t.u, &t.v, t.sigma, a)?;
    let ti = internal_gauge(method, t)?;
    let m = assemble(method, a, &ti)?;
    let sys = AdjointSystem::new(method, a.shape(), &m)?;
    let br = to_internal_gauge(t, &ti, &partials.fr)?;
    let bi = to_internal_gauge(t, &ti, &partials.fi)?;
    let (rr, ri) = one_output(
        method,
        a,
        &ti,
        &sys,
        &br,
        (&direct.dfr_dar, &direct.dfr_dai),
    )?;
    let (ir, ii) = one_output(
        method,
        a,
        &ti,
        &sys,
        &bi,
        (&direct.dfi_dar, &direct.dfi_dai),
    )?;
    let out = GradientBundle {
        dfr_dar: rr,
        dfr_dai: ri,
        dfi_dar: ir,
        dfi_dai: ii,
    };
    if !out.is_finite() {
        return Err(Error::NonFinite("gradient bundle".into()));
    }
    Ok(out)
}
