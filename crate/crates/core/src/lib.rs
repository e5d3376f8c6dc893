//! Derivative-free trust-region optimization with finite-difference
//! gradients and quasi-Newton models.
//!
//! The core is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar for the common case.

// NaN-rejecting `!(a > b)` checks and index loops over several slices are
// deliberate in the numeric kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod driver;
pub mod error;
pub mod fdgrad;
pub mod linalg;
pub mod odecalib;
pub mod problem;
pub mod scalar;
pub mod stationarity;
pub mod subproblem;

pub use driver::{
    default_config, solve, solve_with_observer, BoundMode, IterationClass, RunRecord, SolverConfig,
    SubproblemSolver, Termination,
};
pub use error::{Error, OracleError, Result};
pub use problem::{FeasibleSet, Objective, Problem};
pub use scalar::Real;

pub type Problem64 = Problem<f64>;
pub type Problem32 = Problem<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type RunRecord64 = RunRecord<f64>;
pub type RunRecord32 = RunRecord<f32>;
pub type FeasibleSet64 = FeasibleSet<f64>;
