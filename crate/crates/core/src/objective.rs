//! Objectives `f(u, v, σ, A)` with real and imaginary outputs.

use crate::adjoint::GradientBundle;
use crate::error::{Error, Result};
use crate::governing::{phase_factor, Formulation, GmmState, PivotSign, SemmState, State};
use crate::linalg::{Matrix, SplitMatrix, SplitVector};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const DEFAULT_FD_STEP: f64 = 1e-7;

pub type EvalFn<T> =
    Arc<dyn Fn(&SplitVector<T>, &SplitVector<T>, T, &SplitMatrix<T>) -> (T, T) + Send + Sync>;
pub type StateJacobianFn<T> = Arc<
    dyn Fn(&SplitVector<T>, &SplitVector<T>, T, &SplitMatrix<T>) -> ObjectivePartials<T>
        + Send
        + Sync,
>;
pub type APartialFn<T> = Arc<
    dyn Fn(&SplitVector<T>, &SplitVector<T>, T, &SplitMatrix<T>) -> GradientBundle<T> + Send + Sync,
>;

/// Partials of one real output with respect to `u`, `v` and `σ`. Vector
/// entries hold `∂f/∂x_r + i ∂f/∂x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePartials<T> {
    pub u: SplitVector<T>,
    pub v: SplitVector<T>,
    pub sigma: T,
}

impl<T: Real> StatePartials<T> {
    pub fn zeros(m: usize, n: usize) -> Self {
        StatePartials {
            u: SplitVector::zeros(m),
            v: SplitVector::zeros(n),
            sigma: T::zero(),
        }
    }

    /// Flattened in SEMM order `[u_r; u_i; v_r; v_i; σ_r; σ_i]`.
    pub fn to_semm_vec(&self) -> Vec<T> {
        let mut w = self.u.stacked();
        w.extend(self.v.stacked());
        w.push(self.sigma);
        w.push(T::zero());
        w
    }
}

/// State partials of `f_r` and `f_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectivePartials<T> {
    pub fr: StatePartials<T>,
    pub fi: StatePartials<T>,
}

/// A complex-valued objective with optional analytic derivatives.
#[derive(Clone)]
pub struct ObjectiveSpec<T> {
    pub eval: EvalFn<T>,
    pub state_jacobian: Option<StateJacobianFn<T>>,
    pub a_partial: Option<APartialFn<T>>,
    /// Relative central-difference step for derivatives that are not analytic.
    pub fd_step: T,
}

impl<T: Real> std::fmt::Debug for ObjectiveSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("state_jacobian", &self.state_jacobian.is_some())
            .field("a_partial", &self.a_partial.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl<T: Real> ObjectiveSpec<T> {
    pub fn new(
        eval: impl Fn(&SplitVector<T>, &SplitVector<T>, T, &SplitMatrix<T>) -> (T, T)
            + Send
            + Sync
            + 'static,
    ) -> Self {
        ObjectiveSpec {
            eval: Arc::new(eval),
            state_jacobian: None,
            a_partial: None,
            fd_step: T::lit(DEFAULT_FD_STEP),
        }
    }

    pub fn with_state_jacobian(mut self, f: StateJacobianFn<T>) -> Self {
        self.state_jacobian = Some(f);
        self
    }

    pub fn with_a_partial(mut self, f: APartialFn<T>) -> Self {
        self.a_partial = Some(f);
        self
    }

    pub fn with_fd_step(mut self, h: T) -> Self {
        self.fd_step = h;
        self
    }

    /// Drops analytic derivatives so every partial comes from finite differences.
    pub fn without_analytic(mut self) -> Self {
        self.state_jacobian = None;
        self.a_partial = None;
        self
    }

    /// `f = σ`
    pub fn sigma() -> Self {
        let jac: StateJacobianFn<T> = Arc::new(|u, v, _, _| {
            let mut fr = StatePartials::zeros(u.len(), v.len());
            fr.sigma = T::one();
            ObjectivePartials {
                fr,
                fi: StatePartials::zeros(u.len(), v.len()),
            }
        });
        let ap: APartialFn<T> = Arc::new(|_, _, _, a| GradientBundle::zeros(a.rows(), a.cols()));
        Self::new(|_, _, s, _| (s, T::zero()))
            .with_state_jacobian(jac)
            .with_a_partial(ap)
    }

    pub fn evaluate(
        &self,
        u: &SplitVector<T>,
        v: &SplitVector<T>,
        sigma: T,
        a: &SplitMatrix<T>,
    ) -> Result<(T, T)> {
        let (fr, fi) = (self.eval)(u, v, sigma, a);
        if !(fr.is_finite() && fi.is_finite()) {
            return Err(Error::NonFinite("objective value".into()));
        }
        Ok((fr, fi))
    }

    /// Analytic state partials when available, otherwise central differences.
    pub fn state_partials(
        &self,
        u: &SplitVector<T>,
        v: &SplitVector<T>,
        sigma: T,
        a: &SplitMatrix<T>,
    ) -> Result<ObjectivePartials<T>> {
        if let Some(jac) = &self.state_jacobian {
            return Ok(jac(u, v, sigma, a));
        }
        let (m, n) = (u.len(), v.len());
        let state = State::Semm(SemmState {
            u: u.clone(),
            v: v.clone(),
            sigma_re: sigma,
            sigma_im: T::zero(),
            k: 0,
        });
        let (gr, gi) = fd_state_jacobian(self, Formulation::Semm, a, &state)?;
        let unpack = |g: &[T]| StatePartials {
            u: SplitVector {
                re: g[..m].to_vec(),
                im: g[m..2 * m].to_vec(),
            },
            v: SplitVector {
                re: g[2 * m..2 * m + n].to_vec(),
                im: g[2 * m + n..2 * m + 2 * n].to_vec(),
            },
            sigma: g[2 * m + 2 * n],
        };
        Ok(ObjectivePartials {
            fr: unpack(&gr),
            fi: unpack(&gi),
        })
    }

    /// Analytic `∂f/∂A` when available, otherwise central differences.
    pub fn a_partials(
        &self,
        u: &SplitVector<T>,
        v: &SplitVector<T>,
        sigma: T,
        a: &SplitMatrix<T>,
    ) -> Result<GradientBundle<T>> {
        match &self.a_partial {
            Some(f) => Ok(f(u, v, sigma, a)),
            None => fd_matrix_partial(self, u, v, sigma, a),
        }
    }
}

/// Evaluates `f` on a formulation's state. GMM states are reduced first:
/// LGMM sets `u = φ`, `v = A* φ / σ`; RGMM sets `v = φ`, `u = A φ / σ`; `σ = √λ_r`.
pub fn eval_on_state<T: Real>(
    obj: &ObjectiveSpec<T>,
    kind: Formulation,
    a: &SplitMatrix<T>,
    state: &State<T>,
) -> Result<(T, T)> {
    match (kind, state) {
        (Formulation::Semm, State::Semm(s)) => obj.evaluate(&s.u, &s.v, s.sigma_re, a),
        (Formulation::Lgmm, State::Gmm(g)) => {
            let sigma = g.lambda_re.sqrt();
            let v = a.adjoint_matvec(&g.phi).scale_real(T::one() / sigma);
            obj.evaluate(&g.phi, &v, sigma, a)
        }
        (Formulation::Rgmm, State::Gmm(g)) => {
            let sigma = g.lambda_re.sqrt();
            let u = a.matvec(&g.phi).scale_real(T::one() / sigma);
            obj.evaluate(&u, &g.phi, sigma, a)
        }
        _ => Err(Error::Config(format!("state does not belong to {kind}"))),
    }
}

type Rebuild<T> = Box<dyn Fn(&[T]) -> State<T>>;

/// Central-difference `(∂f_r/∂w, ∂f_i/∂w)` in the formulation's `w` layout,
/// step `fd_step · max(1, |w_j|)`.
pub fn fd_state_jacobian<T: Real>(
    obj: &ObjectiveSpec<T>,
    kind: Formulation,
    a: &SplitMatrix<T>,
    state: &State<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let (w, rebuild): (Vec<T>, Rebuild<T>) = match state {
        State::Semm(s) => {
            let (m, n, k) = (s.u.len(), s.v.len(), s.k);
            (
                s.to_vec(),
                Box::new(move |w| State::Semm(SemmState::from_slice(w, m, n, k))),
            )
        }
        State::Gmm(g) => {
            let k = g.k;
            (
                g.to_vec(),
                Box::new(move |w| State::Gmm(GmmState::from_slice(w, k))),
            )
        }
    };
    let mut gr = vec![T::zero(); w.len()];
    let mut gi = vec![T::zero(); w.len()];
    let mut probe = w.clone();
    for j in 0..w.len() {
        let h = obj.fd_step * T::one().max(w[j].abs());
        probe[j] = w[j] + h;
        let (pr, pi) = eval_on_state(obj, kind, a, &rebuild(&probe))?;
        probe[j] = w[j] - h;
        let (mr, mi) = eval_on_state(obj, kind, a, &rebuild(&probe))?;
        probe[j] = w[j];
        gr[j] = (pr - mr) / (T::two() * h);
        gi[j] = (pi - mi) / (T::two() * h);
    }
    Ok((gr, gi))
}

/// Central-difference `∂f/∂A` holding `(u, v, σ)` fixed.
pub fn fd_matrix_partial<T: Real>(
    obj: &ObjectiveSpec<T>,
    u: &SplitVector<T>,
    v: &SplitVector<T>,
    sigma: T,
    a: &SplitMatrix<T>,
) -> Result<GradientBundle<T>> {
    let (m, n) = a.shape();
    let mut out = GradientBundle::zeros(m, n);
    let mut probe = a.clone();
    for p in 0..m {
        for q in 0..n {
            for imag in [false, true] {
                let x = if imag { a.im[(p, q)] } else { a.re[(p, q)] };
                let h = obj.fd_step * T::one().max(x.abs());
                let slot = |pr: &mut SplitMatrix<T>, val: T| {
                    if imag {
                        pr.im[(p, q)] = val;
                    } else {
                        pr.re[(p, q)] = val;
                    }
                };
                slot(&mut probe, x + h);
                let (pr, pi) = obj.evaluate(u, v, sigma, &probe)?;
                slot(&mut probe, x - h);
                let (mr, mi) = obj.evaluate(u, v, sigma, &probe)?;
                slot(&mut probe, x);
                let (dr, di) = ((pr - mr) / (T::two() * h), (pi - mi) / (T::two() * h));
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

/// `f = c_uᵀ u + c_vᵀ v + c_σ σ + c_A Tr(A)`.
///
/// With `per_vector_phase`, `u` and `v` are each rotated so that their own
/// largest entry is real and positive before the products are taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearObjectiveParams<T> {
    pub c_u: SplitVector<T>,
    pub c_v: SplitVector<T>,
    #[serde(default)]
    pub c_sigma: T,
    #[serde(default, rename = "c_A")]
    pub c_a: T,
    #[serde(default)]
    pub per_vector_phase: bool,
}

impl<T: Real> LinearObjectiveParams<T> {
    pub fn sigma_only(m: usize, n: usize) -> Self {
        LinearObjectiveParams {
            c_u: SplitVector::zeros(m),
            c_v: SplitVector::zeros(n),
            c_sigma: T::one(),
            c_a: T::zero(),
            per_vector_phase: false,
        }
    }

    pub fn check_dims(&self, m: usize, n: usize) -> Result<()> {
        if self.c_u.len() != m || self.c_v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "objective has c_u of {} and c_v of {}, matrix is {}x{}",
                self.c_u.len(),
                self.c_v.len(),
                m,
                n
            )));
        }
        Ok(())
    }
}

fn gauge_vector<T: Real>(x: &SplitVector<T>, on: bool) -> SplitVector<T> {
    if !on {
        return x.clone();
    }
    match phase_factor(x, x.argmax_abs(), PivotSign::Positive) {
        Ok(map) => x.scale(map.s),
        Err(_) => SplitVector {
            re: vec![T::nan(); x.len()],
            im: vec![T::nan(); x.len()],
        },
    }
}

/// Pulls a cotangent on the gauged vector back to the raw vector.
fn gauge_cotangent<T: Real>(x: &SplitVector<T>, ybar: SplitVector<T>, on: bool) -> SplitVector<T> {
    if !on {
        return ybar;
    }
    match phase_factor(x, x.argmax_abs(), PivotSign::Positive) {
        Ok(map) => map.pullback(&[x], &[&ybar], 0).remove(0),
        Err(_) => SplitVector {
            re: vec![T::nan(); x.len()],
            im: vec![T::nan(); x.len()],
        },
    }
}

/// Builds the linear objective with exact analytic partials.
pub fn linear_objective<T: Real>(p: LinearObjectiveParams<T>) -> ObjectiveSpec<T> {
    let p = Arc::new(p);
    let pe = Arc::clone(&p);
    let eval = move |u: &SplitVector<T>, v: &SplitVector<T>, s: T, a: &SplitMatrix<T>| {
        let uh = gauge_vector(u, pe.per_vector_phase);
        let vh = gauge_vector(v, pe.per_vector_phase);
        let cu = pe.c_u.tdot(&uh);
        let cv = pe.c_v.tdot(&vh);
        let tr = a.trace();
        (
            cu.re + cv.re + pe.c_sigma * s + pe.c_a * tr.re,
            cu.im + cv.im + pe.c_a * tr.im,
        )
    };
    let pj = Arc::clone(&p);
    let jac: StateJacobianFn<T> = Arc::new(move |u, v, _, _| {
        // cotangent of Re(cᵀy) is conj(c), of Im(cᵀy) is i·conj(c)
        let re_bar = |c: &SplitVector<T>| c.conj();
        let im_bar = |c: &SplitVector<T>| SplitVector {
            re: c.im.clone(),
            im: c.re.clone(),
        };
        let on = pj.per_vector_phase;
        ObjectivePartials {
            fr: StatePartials {
                u: gauge_cotangent(u, re_bar(&pj.c_u), on),
                v: gauge_cotangent(v, re_bar(&pj.c_v), on),
                sigma: pj.c_sigma,
            },
            fi: StatePartials {
                u: gauge_cotangent(u, im_bar(&pj.c_u), on),
                v: gauge_cotangent(v, im_bar(&pj.c_v), on),
                sigma: T::zero(),
            },
        }
    });
    let pa = Arc::clone(&p);
    let apart: APartialFn<T> = Arc::new(move |_, _, _, a| {
        let (m, n) = a.shape();
        let eye = Matrix::eye(m, n).scale(pa.c_a);
        let z = Matrix::zeros(m, n);
        GradientBundle {
            dfr_dar: eye.clone(),
            dfr_dai: z.clone(),
            dfi_dar: z,
            dfi_dai: eye,
        }
    });
    ObjectiveSpec::new(eval)
        .with_state_jacobian(jac)
        .with_a_partial(apart)
}

/// Objective descriptor accepted on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ObjectiveDescriptor {
    Linear(LinearObjectiveParams<f64>),
    Sigma,
}

impl ObjectiveDescriptor {
    pub fn build(&self, m: usize, n: usize) -> Result<ObjectiveSpec<f64>> {
        match self {
            ObjectiveDescriptor::Linear(p) => {
                p.check_dims(m, n)?;
                Ok(linear_objective(p.clone()))
            }
            ObjectiveDescriptor::Sigma => Ok(ObjectiveSpec::sigma()),
        }
    }

    pub fn is_sigma(&self) -> bool {
        match self {
            ObjectiveDescriptor::Sigma => true,
            ObjectiveDescriptor::Linear(p) => {
                p.c_u.max_abs() == 0.0 && p.c_v.max_abs() == 0.0 && p.c_sigma == 1.0 && p.c_a == 0.0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (SplitMatrix<f64>, SplitVector<f64>, SplitVector<f64>) {
        let a = SplitMatrix::from_rows(
            &[
                vec![-1.01, 0.86, -31.42],
                vec![3.98, 0.53, -7.04],
                vec![3.3, 8.26, -3.89],
            ],
            &[
                vec![0.6, 0.79, 5.47],
                vec![7.21, 1.9, 0.58],
                vec![3.42, 8.97, 0.3],
            ],
        )
        .unwrap();
        let u = SplitVector::new(vec![0.3, -0.6, 0.2], vec![0.1, 0.5, -0.4]).unwrap();
        let v = SplitVector::new(vec![-0.2, 0.1, 0.7], vec![0.6, -0.3, 0.0]).unwrap();
        (a, u, v)
    }

    fn params(phase: bool) -> LinearObjectiveParams<f64> {
        let c = SplitVector::new(vec![0.16, 0.53, 0.11], vec![0.78, 0.11, 0.77]).unwrap();
        LinearObjectiveParams {
            c_u: c.clone(),
            c_v: c,
            c_sigma: 1.0,
            c_a: 1.0,
            per_vector_phase: phase,
        }
    }

    #[test]
    fn trace_only() {
        let (a, u, v) = sample();
        let mut p = LinearObjectiveParams::sigma_only(3, 3);
        p.c_sigma = 0.0;
        p.c_a = 1.0;
        let (fr, fi) = linear_objective(p).evaluate(&u, &v, 2.0, &a).unwrap();
        assert!((fr + 4.37).abs() < 1e-14);
        assert!((fi - 2.8).abs() < 1e-14);
    }

    #[test]
    fn analytic_state_jacobian_matches_fd() {
        let (a, u, v) = sample();
        for phase in [false, true] {
            let obj = linear_objective(params(phase));
            let an = obj.state_partials(&u, &v, 2.0, &a).unwrap();
            let fd = obj
                .clone()
                .without_analytic()
                .state_partials(&u, &v, 2.0, &a)
                .unwrap();
            for (x, y) in [(&an.fr, &fd.fr), (&an.fi, &fd.fi)] {
                assert!(x.u.max_abs_diff(&y.u) < 1e-8, "phase={phase}");
                assert!(x.v.max_abs_diff(&y.v) < 1e-8);
                assert!((x.sigma - y.sigma).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn trace_partial_is_identity_pattern() {
        let (a, u, v) = sample();
        let obj = linear_objective(params(false)).without_analytic();
        let b = obj.a_partials(&u, &v, 2.0, &a).unwrap();
        let eye = Matrix::<f64>::identity(3);
        assert!(b.dfr_dar.sub(&eye).max_abs() < 1e-7);
        assert!(b.dfi_dai.sub(&eye).max_abs() < 1e-7);
        assert!(b.dfr_dai.max_abs() < 1e-7 && b.dfi_dar.max_abs() < 1e-7);
    }

    #[test]
    fn no_a_dependence_gives_zero_partial() {
        let (a, u, v) = sample();
        let obj = ObjectiveSpec::new(
            |u: &SplitVector<f64>, _: &SplitVector<f64>, s, _: &SplitMatrix<f64>| {
                (u.re[0] * s, u.im[1])
            },
        );
        let b = obj.a_partials(&u, &v, 2.0, &a).unwrap();
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn sigma_state_jacobian_is_slot_pattern() {
        let (a, u, v) = sample();
        let st = State::Semm(SemmState {
            u,
            v,
            sigma_re: 2.0,
            sigma_im: 0.0,
            k: 0,
        });
        let (gr, gi) =
            fd_state_jacobian(&ObjectiveSpec::sigma(), Formulation::Semm, &a, &st).unwrap();
        for (j, g) in gr.iter().enumerate() {
            let want = if j == 12 { 1.0 } else { 0.0 };
            assert!((g - want).abs() < 1e-9);
        }
        assert!(gi.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn layout_slot_probes() {
        let (a, u, v) = sample();
        let st = State::Semm(SemmState {
            u,
            v,
            sigma_re: 2.0,
            sigma_im: 0.0,
            k: 0,
        });
        // objective picking v_i[1] must light up slot 2m + n + 1
        let obj = ObjectiveSpec::new(
            |_: &SplitVector<f64>, v: &SplitVector<f64>, _, _: &SplitMatrix<f64>| (v.im[1], 0.0),
        );
        let (gr, _) = fd_state_jacobian(&obj, Formulation::Semm, &a, &st).unwrap();
        let hot: Vec<usize> = gr
            .iter()
            .enumerate()
            .filter(|(_, g)| g.abs() > 0.5)
            .map(|(j, _)| j)
            .collect();
        assert_eq!(hot, vec![10]);
    }

    #[test]
    fn descriptor_parses() {
        let text = r#"{"type":"linear","c_u":{"re":[1,0],"im":[0,1]},"c_v":{"re":[2],"im":[0]},"c_sigma":1,"c_A":0.5}"#;
        let d: ObjectiveDescriptor = serde_json::from_str(text).unwrap();
        assert!(d.build(2, 1).is_ok());
        assert!(d.build(3, 1).is_err());
        let s: ObjectiveDescriptor = serde_json::from_str(r#"{"type":"sigma"}"#).unwrap();
        assert!(s.is_sigma());
    }
}
