//! The allotment subspace multigraph, kept as per-pair transfer heaps, and
//! the auxiliary graphs materialized from it.

mod graph;
mod heap;
mod index;

pub use graph::{build_negcycle_graph, build_negpath_graph, AuxEdge, AuxGraph, EdgePayload};
pub(crate) use graph::best_move;
pub use heap::TransferHeap;
pub use index::{SubspaceIndex, TargetColumn};

use crate::engine::Engine;
use crate::model::{Allotment, Cost, CostMatrix};
use crate::Result;

/// Potential move of `demand` from `from` to `to`, costing
/// `CM(demand, to) - CM(demand, from)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferEdge {
    pub from: usize,
    pub to: usize,
    pub demand: usize,
    pub cost: Cost,
}

/// Reassigns `edge.demand` in both the allotment and the index.
///
/// Fails without side effects if the demand is no longer at `edge.from`.
pub fn apply_transfer<E: Engine + ?Sized>(
    index: &mut SubspaceIndex,
    allotment: &mut Allotment,
    cm: &CostMatrix,
    edge: &TransferEdge,
    engine: &E,
) -> Result<()> {
    let TransferEdge {
        from, to, demand, ..
    } = *edge;
    index.transfer(cm, demand, from, to, engine)?;
    allotment
        .move_demand(demand, from, to)
        .expect("index and allotment agree on the demand's center");
    Ok(())
}
