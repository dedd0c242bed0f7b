use alloc::vec::Vec;
use core::fmt;

use crate::model::ValidationIssue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The instance violates one or more structural invariants.
    InvalidInstance(Vec<ValidationIssue>),
    /// Objective evaluation needs every demand assigned.
    IncompleteAllotment { demand: usize },
    /// Integer overflow while accumulating an objective or penalty.
    Overflow,
    DemandOutOfRange { demand: usize, n: usize },
    CenterOutOfRange { center: usize, k: usize },
    AlreadyIndexed { demand: usize },
    NotIndexed { demand: usize },
    /// A transfer edge refers to a demand that is no longer at its source.
    StaleTransfer {
        demand: usize,
        from: usize,
        actual: Option<usize>,
    },
    SameCenter { center: usize },
    AnchorNotOverloaded { anchor: usize },
    /// Bellman-Ford still improved a distance after |nodes| rounds.
    NegativeCycle,
    /// Following parent pointers revisited a node.
    NonSimplePath { node: usize },
    /// The instrumented no-negative-cycle check failed.
    InvariantViolation { iteration: usize, step: u8 },
    OracleTooLarge { n: usize, limit: usize },
    /// Strict mode without preprocessing and more demand than capacity.
    StrictInfeasible { demand: usize, capacity: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInstance(issues) => {
                write!(f, "invalid instance: ")?;
                for (i, issue) in issues.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{issue}")?;
                }
                Ok(())
            }
            Error::IncompleteAllotment { demand } => {
                write!(f, "allotment is incomplete: demand {demand} is unassigned")
            }
            Error::Overflow => write!(f, "integer overflow in cost accumulation"),
            Error::DemandOutOfRange { demand, n } => {
                write!(f, "demand index {demand} out of range (n = {n})")
            }
            Error::CenterOutOfRange { center, k } => {
                write!(f, "center index {center} out of range (k = {k})")
            }
            Error::AlreadyIndexed { demand } => write!(f, "demand {demand} is already indexed"),
            Error::NotIndexed { demand } => write!(f, "demand {demand} is not indexed"),
            Error::StaleTransfer {
                demand,
                from,
                actual,
            } => match actual {
                Some(c) => write!(
                    f,
                    "stale transfer: demand {demand} expected at center {from}, found at {c}"
                ),
                None => write!(
                    f,
                    "stale transfer: demand {demand} expected at center {from}, found unassigned"
                ),
            },
            Error::SameCenter { center } => {
                write!(f, "transfer source and target are both center {center}")
            }
            Error::AnchorNotOverloaded { anchor } => {
                write!(f, "anchor center {anchor} is not overloaded")
            }
            Error::NegativeCycle => write!(f, "negative cycle detected in auxiliary graph"),
            Error::NonSimplePath { node } => {
                write!(f, "path reconstruction revisited node {node}")
            }
            Error::InvariantViolation { iteration, step } => write!(
                f,
                "negative cycle present after step {step} of iteration {iteration}"
            ),
            Error::OracleTooLarge { n, limit } => {
                write!(f, "oracle limited to {limit} demands, instance has {n}")
            }
            Error::StrictInfeasible { demand, capacity } => write!(
                f,
                "strict instance infeasible: demand {demand} exceeds total capacity {capacity}"
            ),
        }
    }
}

impl core::error::Error for Error {}
