//! Worker-pool engine for the two hot spots: Bellman-Ford relaxation rounds
//! and per-column heap updates.
//!
//! Both phases are fork-join over disjoint output slices, so results are
//! identical to [`SequentialEngine`] for every worker count.

use std::fmt;
use std::str::FromStr;

use lbdd_core::engine::relax_range;
use lbdd_core::refine::Labels;
use lbdd_core::subspace::{apply_transfer, AuxGraph, SubspaceIndex, TargetColumn, TransferEdge};
use lbdd_core::{Allotment, CostMatrix, Engine, SequentialEngine};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Which phases run on the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phases {
    pub relaxation: bool,
    pub index_update: bool,
}

impl Phases {
    pub const ALL: Phases = Phases {
        relaxation: true,
        index_update: true,
    };
    pub const NONE: Phases = Phases {
        relaxation: false,
        index_update: false,
    };
}

impl Default for Phases {
    fn default() -> Self {
        Phases::ALL
    }
}

impl fmt::Display for Phases {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.relaxation, "relaxation"),
            (self.index_update, "index_update"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for Phases {
    type Err = String;

    /// Comma-separated subset of `relaxation`, `index_update`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut phases = Phases::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "relaxation" => phases.relaxation = true,
                "index_update" => phases.index_update = true,
                other => return Err(format!("unknown phase `{other}`")),
            }
        }
        Ok(phases)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelConfig {
    pub workers: usize,
    /// Target number of incoming edges per relaxation task.
    pub chunk_edges: usize,
    pub phases: Phases,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            chunk_edges: 64,
            phases: Phases::ALL,
        }
    }
}

impl ParallelConfig {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers,
            ..Self::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParallelError {
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("chunk size must be at least 1")]
    EmptyChunk,
    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub struct ParallelEngine {
    config: ParallelConfig,
    pool: ThreadPool,
}

impl fmt::Debug for ParallelEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParallelEngine")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl ParallelEngine {
    pub fn new(config: ParallelConfig) -> Result<Self, ParallelError> {
        if config.workers == 0 {
            return Err(ParallelError::NoWorkers);
        }
        if config.chunk_edges == 0 {
            return Err(ParallelError::EmptyChunk);
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .thread_name(|i| format!("lbdd-worker-{i}"))
            .build()?;
        Ok(Self { config, pool })
    }

    pub fn config(&self) -> &ParallelConfig {
        &self.config
    }

    /// One relaxation round into a fresh label set.
    pub fn parallel_relax_round(&self, graph: &AuxGraph, input: &Labels) -> (Labels, bool) {
        let mut output = input.clone();
        let changed = self.relax_round(graph, input, &mut output);
        (output, changed)
    }

    /// Applies a transfer with the heap updates spread over the pool.
    pub fn parallel_index_update(
        &self,
        index: &mut SubspaceIndex,
        allotment: &mut Allotment,
        cm: &CostMatrix,
        edge: &TransferEdge,
    ) -> lbdd_core::Result<()> {
        apply_transfer(index, allotment, cm, edge, self)
    }

    fn nodes_per_task(&self, graph: &AuxGraph) -> usize {
        let nodes = graph.node_count();
        let edges = graph.edge_count().max(1);
        (self.config.chunk_edges * nodes / edges).clamp(1, nodes.max(1))
    }
}

impl Engine for ParallelEngine {
    fn relax_round(&self, graph: &AuxGraph, input: &Labels, output: &mut Labels) -> bool {
        if !self.config.phases.relaxation || self.config.workers == 1 {
            return SequentialEngine.relax_round(graph, input, output);
        }
        let chunk = self.nodes_per_task(graph);
        self.pool.install(|| {
            output
                .dist
                .par_chunks_mut(chunk)
                .zip(output.parent.par_chunks_mut(chunk))
                .enumerate()
                .map(|(i, (dist, parent))| relax_range(graph, input, i * chunk, dist, parent))
                .reduce(|| false, |a, b| a | b)
        })
    }

    fn for_each_column(&self, columns: &mut [TargetColumn], op: &(dyn Fn(&mut TargetColumn) + Sync)) {
        if !self.config.phases.index_update || self.config.workers == 1 {
            return SequentialEngine.for_each_column(columns, op);
        }
        self.pool.install(|| columns.par_iter_mut().for_each(op));
    }
}
