//! Host-side companion to `lbdd-core`: a worker-pool engine, the synthetic
//! instance generator, file formats and the command-line front end.

pub mod cli;
pub mod format;
pub mod instgen;
pub mod parallel;

pub use cli::{run, solve_with, CliError, WallClock};
pub use parallel::{ParallelConfig, ParallelEngine, Phases};
