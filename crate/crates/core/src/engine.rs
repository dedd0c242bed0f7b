//! Execution hooks for the two hot spots of a solve: one synchronous
//! relaxation round of Bellman-Ford, and the per-column heap updates of a
//! transfer. [`SequentialEngine`] runs both on the calling thread.
//!
//! Implementations must produce exactly the state the sequential engine
//! produces. Relaxation reads only `input` and writes only `output`, one
//! node at a time via [`relax_node`](crate::refine::relax_node), so any
//! partition of the nodes is safe. Column updates touch disjoint data.

use crate::refine::{relax_node, Labels};
use crate::subspace::{AuxGraph, TargetColumn};

pub trait Engine {
    /// One Jacobi relaxation round: `output` receives the relaxed labels of
    /// every node. Returns whether any distance changed.
    fn relax_round(&self, graph: &AuxGraph, input: &Labels, output: &mut Labels) -> bool;

    /// Applies `op` to every column exactly once.
    fn for_each_column(&self, columns: &mut [TargetColumn], op: &(dyn Fn(&mut TargetColumn) + Sync));
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialEngine;

impl Engine for SequentialEngine {
    fn relax_round(&self, graph: &AuxGraph, input: &Labels, output: &mut Labels) -> bool {
        relax_range(graph, input, 0, &mut output.dist, &mut output.parent)
    }

    fn for_each_column(&self, columns: &mut [TargetColumn], op: &(dyn Fn(&mut TargetColumn) + Sync)) {
        columns.iter_mut().for_each(op);
    }
}

/// Relaxes the nodes `first..first + dist.len()` into the given output
/// slices. Returns whether any of them changed.
pub fn relax_range(
    graph: &AuxGraph,
    input: &Labels,
    first: usize,
    dist: &mut [crate::Cost],
    parent: &mut [Option<u32>],
) -> bool {
    let mut changed = false;
    for (offset, (d, p)) in dist.iter_mut().zip(parent.iter_mut()).enumerate() {
        let node = first + offset;
        let (nd, np) = relax_node(graph, input, node);
        changed |= nd != input.dist[node];
        *d = nd;
        *p = np;
    }
    changed
}

/// Monotonic time source for the per-phase timing breakdown.
pub trait Clock {
    fn now_nanos(&self) -> u64;
}

/// Clock that always reads zero; timings come out empty.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_nanos(&self) -> u64 {
        0
    }
}
