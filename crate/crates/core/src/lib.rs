//! The discrete-time SISI epidemic operator on the 3-simplex.
//!
//! A state `(x, u, y, v)` holds the densities of never-infected
//! susceptibles, first-time infected, recovered, and second-time infected.
//! One step of the operator is
//!
//! ```text
//! x' = x + b − b·x − β1·A·x
//! u' = u − b·u − α·u + β1·A·x
//! y' = y − b·y + α·u − β2·A·y
//! v' = v − b·v + β2·A·y          with A = k1·u + k2·v
//! ```
//!
//! The crate validates when this map is a quadratic stochastic operator,
//! enumerates its fixed points, classifies them by the spectrum of the
//! Jacobian, and runs reproducible numerical experiments on the limit
//! behaviour of trajectories.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod fixed_points;
pub mod harness;
pub mod params;
pub mod report;
pub mod simplex;
pub mod stability;

pub use dynamics::{apply, apply_raw, force_of_infection, iterate_trajectory, Trajectory, TrajectoryStatus, TOL_CONV};
pub use eigen::{eigenvalues4, Matrix4, Spectrum};
pub use error::{Error, Result};
pub use fixed_points::{
    build_lambda15, build_lambda16, build_lambda17, enumerate_fixed_points, solve_force_equation, Face,
    FixedPointLabel, FixedPointRecord, FixedPointSet, RootOutcome, RootResult,
};
pub use params::{validate_params, Params, ValidationReport};
pub use simplex::{Coord, SimplexPoint, TOL_SIMPLEX};
pub use stability::{
    classify_fixed_point, invariant_set_member, jacobian, lambda16_spectrum, reduced_operator_step, Classification,
    ReducedState, StabilityKind, UNIT_CIRCLE_TOL,
};
