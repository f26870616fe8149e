//! One step of the operator and trajectory iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;
use crate::simplex::{on_simplex, sup_distance, SimplexPoint, TOL_SIMPLEX};

/// Default sup-norm step tolerance for convergence.
pub const TOL_CONV: f64 = 1e-10;

/// Stored trajectories keep at most roughly this many iterates.
pub const MAX_STORED_ITERATES: u64 = 10_000;

/// Force of infection `A(u, v) = k1·u + k2·v`.
pub fn force_of_infection(p: &Params, s: &SimplexPoint) -> f64 {
    p.k1 * s.u() + p.k2 * s.v()
}

/// The operator on raw coordinates. No membership checks; valid off the simplex.
pub fn apply_raw(p: &Params, c: &[f64; 4]) -> [f64; 4] {
    let [x, u, y, v] = *c;
    let a = p.k1 * u + p.k2 * v;
    let infect_x = p.beta1 * a * x;
    let infect_y = p.beta2 * a * y;
    [
        x + p.b - p.b * x - infect_x,
        u - p.b * u - p.alpha * u + infect_x,
        y - p.b * y + p.alpha * u - infect_y,
        v - p.b * v + infect_y,
    ]
}

/// Applies the operator once. Fails with `LeftSimplex` if the image is off
/// the simplex, which can only happen for inadmissible parameters.
pub fn apply(p: &Params, s: &SimplexPoint) -> Result<SimplexPoint> {
    let next = apply_raw(p, s.as_array());
    if on_simplex(&next, TOL_SIMPLEX) {
        Ok(SimplexPoint::from_array_unchecked(next))
    } else {
        Err(Error::LeftSimplex { point: next })
    }
}

/// Sup-norm of `V(s) − s`.
pub fn fixedness_residual(p: &Params, c: &[f64; 4]) -> f64 {
    sup_distance(&apply_raw(p, c), c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Converged { limit: SimplexPoint, at_step: u64 },
    MaxItersReached,
    LeftSimplex { at_step: u64 },
}

/// An orbit of the operator.
///
/// `iterates[i]` is the state after `steps[i]` applications. Long runs are
/// thinned, but the first and the last two states are always kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: Params,
    pub iterates: Vec<SimplexPoint>,
    pub steps: Vec<u64>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn last(&self) -> &SimplexPoint {
        self.iterates.last().expect("trajectory always holds the initial point")
    }

    pub fn converged(&self) -> bool {
        matches!(self.status, TrajectoryStatus::Converged { .. })
    }

    /// Number of operator applications performed.
    pub fn steps_used(&self) -> u64 {
        *self.steps.last().unwrap_or(&0)
    }
}

/// Iterates until the sup-norm step falls below `tol_conv`, the orbit leaves
/// the simplex, or `max_iters` applications have been made.
pub fn iterate_trajectory(p: &Params, s0: &SimplexPoint, max_iters: u64, tol_conv: f64) -> Result<Trajectory> {
    if max_iters < 1 {
        return Err(Error::PreconditionViolated("max_iters must be at least 1".into()));
    }
    if !(tol_conv > 0.0) {
        return Err(Error::PreconditionViolated("tol_conv must be positive".into()));
    }
    let stride = max_iters.div_ceil(MAX_STORED_ITERATES).max(1);

    let mut iterates = vec![*s0];
    let mut steps = vec![0u64];
    let record = |iterates: &mut Vec<SimplexPoint>, steps: &mut Vec<u64>, n: u64, s: SimplexPoint| {
        if steps.last() != Some(&n) {
            iterates.push(s);
            steps.push(n);
        }
    };

    let mut current = *s0;
    let mut status = TrajectoryStatus::MaxItersReached;
    for n in 1..=max_iters {
        let next = match apply(p, &current) {
            Ok(next) => next,
            Err(_) => {
                record(&mut iterates, &mut steps, n - 1, current);
                status = TrajectoryStatus::LeftSimplex { at_step: n };
                break;
            }
        };
        let delta = current.distance(&next);
        let done = delta < tol_conv;
        if done || n == max_iters {
            record(&mut iterates, &mut steps, n - 1, current);
            record(&mut iterates, &mut steps, n, next);
        } else if n % stride == 0 {
            record(&mut iterates, &mut steps, n, next);
        }
        current = next;
        if done {
            status = TrajectoryStatus::Converged { limit: next, at_step: n };
            break;
        }
    }
    Ok(Trajectory { params: *p, iterates, steps, status })
}
