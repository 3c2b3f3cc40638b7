use super::residual::{semm_jacobian, semm_residual};
use super::SemmState;
use crate::error::{Error, Result};
use crate::linalg::{lu_solve, norm_inf, SplitMatrix};
use crate::scalar::Real;

/// Newton iteration on the SEMM residual until `‖r‖∞ < tol`.
pub fn newton_refine<T: Real>(
    a: &SplitMatrix<T>,
    s: &SemmState<T>,
    max_iter: usize,
    tol: T,
) -> Result<SemmState<T>> {
    let (m, n) = a.shape();
    let mut state = s.clone();
    let mut r = semm_residual(a, &state)?;
    let mut rn = norm_inf(&r);
    for _ in 0..max_iter {
        if rn < tol {
            return Ok(state);
        }
        let jac = semm_jacobian(a, &state);
        let neg: Vec<T> = r.iter().map(|&x| -x).collect();
        let dw = lu_solve(&jac, &neg)?;
        let w: Vec<T> = state
            .to_vec()
            .iter()
            .zip(&dw)
            .map(|(&x, &d)| x + d)
            .collect();
        let next = SemmState::from_slice(&w, m, n, state.k);
        let r_next = semm_residual(a, &next)?;
        state = next;
        r = r_next;
        rn = norm_inf(&r);
    }
    if rn < tol {
        return Ok(state);
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual: rn.to_f64_lossy(),
    })
}
