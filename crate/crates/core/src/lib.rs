//! Solvers for the load balanced demand distribution problem.
//!
//! Demand units are assigned to capacitated service centers. Every allotment
//! beyond a center's capacity pays an overload penalty, and the goal is to
//! minimize total assignment cost plus penalties.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the
//! algorithmic core:
//!
//! - [`model`]: instances, penalty families, objective evaluation.
//! - [`subspace`]: the per-pair transfer heaps and the auxiliary graphs built
//!   from them.
//! - [`refine`]: lowest-cost paths over auxiliary graphs and the
//!   negative-cycle / negative-path refinements.
//! - [`solver`]: the incremental re-adjustment solver, its strict-capacity
//!   variant and a greedy baseline.
//! - [`oracle`]: an exact min-cost-flow reference solver.
//! - [`engine`]: the execution hooks (relaxation rounds, heap updates,
//!   clock) that a host crate can replace with a parallel implementation.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
mod error;
pub mod model;
pub mod oracle;
pub mod refine;
pub mod solver;
pub mod subspace;

pub use engine::{Clock, Engine, NoClock, SequentialEngine};
pub use error::Error;
pub use model::{
    evaluate_objective, marginal_penalty, refund_penalty, validate_instance, Allotment, Cost,
    CostMatrix, PenaltySpec, ProblemInstance, ServiceCenter, ValidationIssue,
};
pub use oracle::{oracle_solve, oracle_solve_with_limit, OracleMode, ORACLE_DEMAND_LIMIT, OracleSolution};
pub use solver::{
    asral_solve, greedy_solve, strict_augmentation, strict_solve, strict_solve_in_order, SolveOptions, SolveReport,
    SolveStats, SolverKind, SolverState, Timings, UnknownSolver,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
