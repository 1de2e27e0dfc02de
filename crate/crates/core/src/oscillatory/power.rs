//! Largest singular value by power iteration on `A*A`.

use super::grid::GridSpec;
use super::kernel::{check_resolution, OscKernelSpec};
use super::operator::{discretize, weighted_norm, LinearOperator};
use crate::error::Result;
use crate::sampling::seeded_rng;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Relative change between successive estimates at which iteration stops.
pub const POWER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when the cap was hit first; `value` is then the best estimate seen.
    pub converged: bool,
    pub rel_change: f64,
}

/// Deterministic complex start vector with entries uniform in the unit square.
pub fn start_vector(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = seeded_rng(seed);
    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Power iteration on `A*A` in the weighted inner product of the source grid.
///
/// The estimate is `‖A v‖` for the current unit iterate `v`, the square root of
/// the Rayleigh quotient of `A*A`. It never exceeds the true norm and converges
/// twice as fast as `‖A*A v‖^{1/2}`.
pub fn power_norm(op: &dyn LinearOperator, max_iter: usize, seed: u64) -> NormEstimate {
    let (w_col, w_row) = (op.col_weight(), op.row_weight());
    let mut v = start_vector(op.cols(), seed);
    let mut mid = vec![Complex64::new(0.0, 0.0); op.rows()];
    let mut next = vec![Complex64::new(0.0, 0.0); op.cols()];
    let mut best = 0.0f64;
    let mut prev = f64::NAN;
    let mut rel = f64::INFINITY;
    for it in 1..=max_iter.max(1) {
        let nv = weighted_norm(&v, w_col);
        if nv == 0.0 {
            return NormEstimate { value: 0.0, iterations: it, converged: true, rel_change: 0.0 };
        }
        v.iter_mut().for_each(|x| *x /= nv);
        op.apply(&v, &mut mid);
        let est = weighted_norm(&mid, w_row);
        best = best.max(est);
        if est == 0.0 {
            return NormEstimate { value: 0.0, iterations: it, converged: true, rel_change: 0.0 };
        }
        if prev.is_finite() {
            rel = (est - prev).abs() / est;
            if rel <= POWER_TOL {
                return NormEstimate { value: best, iterations: it, converged: true, rel_change: rel };
            }
        }
        prev = est;
        op.apply_adjoint(&mid, &mut next);
        std::mem::swap(&mut v, &mut next);
    }
    NormEstimate { value: best, iterations: max_iter, converged: false, rel_change: rel }
}

/// Resolution check, discretization and power iteration.
pub fn operator_norm(spec: &OscKernelSpec, grid: &GridSpec, iterations: usize, seed: u64) -> Result<NormEstimate> {
    check_resolution(spec, grid)?;
    let op = discretize(spec, grid)?;
    Ok(power_norm(op.as_ref(), iterations, seed))
}
