use alloc::vec;
use alloc::vec::Vec;

use super::SubspaceIndex;
use crate::model::{marginal_penalty, refund_penalty, Allotment, Cost, ProblemInstance};
use crate::{Error, Result};

/// What applying an auxiliary edge means for the allotment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgePayload {
    /// Move this demand from the edge's source center to its target.
    Transfer(usize),
    /// Move one zero-cost placeholder unit (strict mode only).
    Dummy,
    /// Closing edge of a negative-path graph: the penalty swap between the
    /// terminal center and the anchor. Moves nothing.
    Penalty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxEdge {
    pub from: usize,
    pub to: usize,
    pub cost: Cost,
    pub payload: EdgePayload,
}

/// Graph over `k + 1` nodes in which the anchor center is split into an
/// out-copy and an in-copy.
///
/// Node `c < k` is center `c`, except that node `anchor` is the anchor's
/// out-copy. Node `k` is the anchor's in-copy. Edges are stored grouped by
/// target and sorted by source within a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxGraph {
    k: usize,
    anchor: usize,
    edges: Vec<AuxEdge>,
    offsets: Vec<usize>,
}

impl AuxGraph {
    /// Builds a graph from arbitrary edges, keeping the cheapest edge per
    /// ordered node pair (first one on ties) and dropping self loops, edges
    /// into the out-copy and edges out of the in-copy.
    pub fn from_edges(k: usize, anchor: usize, edges: impl IntoIterator<Item = AuxEdge>) -> Self {
        assert!(anchor < k, "anchor {anchor} out of range for k = {k}");
        let nodes = k + 1;
        let mut best: Vec<Option<AuxEdge>> = vec![None; nodes * nodes];
        for e in edges {
            assert!(e.from < nodes && e.to < nodes, "edge endpoint out of range");
            if e.from == e.to || e.to == anchor || e.from == k {
                continue;
            }
            let slot = &mut best[e.to * nodes + e.from];
            if slot.is_none_or(|b| e.cost < b.cost) {
                *slot = Some(e);
            }
        }
        let mut graph = Self::empty(k, anchor);
        for to in 0..nodes {
            graph.edges.extend(best[to * nodes..(to + 1) * nodes].iter().flatten());
            graph.offsets[to + 1] = graph.edges.len();
        }
        graph
    }

    fn empty(k: usize, anchor: usize) -> Self {
        Self {
            k,
            anchor,
            edges: Vec::new(),
            offsets: vec![0; k + 2],
        }
    }

    pub fn node_count(&self) -> usize {
        self.k + 1
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn anchor_out(&self) -> usize {
        self.anchor
    }

    pub fn anchor_in(&self) -> usize {
        self.k
    }

    /// The service center a node stands for.
    pub fn center_of_node(&self, node: usize) -> usize {
        if node == self.k {
            self.anchor
        } else {
            node
        }
    }

    pub fn edges(&self) -> &[AuxEdge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &AuxEdge {
        &self.edges[index]
    }

    /// Index range into [`edges`](Self::edges) of the edges entering `node`.
    pub fn incoming_range(&self, node: usize) -> core::ops::Range<usize> {
        self.offsets[node]..self.offsets[node + 1]
    }

    pub fn incoming(&self, node: usize) -> &[AuxEdge] {
        &self.edges[self.incoming_range(node)]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Cheapest move of one unit out of `from` towards `to`, counting
/// placeholder units (zero cost) when `dummies` is given. Real demands win
/// ties with placeholders.
pub(crate) fn best_move(
    index: &SubspaceIndex,
    dummies: Option<&[usize]>,
    from: usize,
    to: usize,
) -> Option<(Cost, EdgePayload)> {
    let real = index
        .peek(from, to)
        .map(|(c, d)| (c, EdgePayload::Transfer(d)));
    let dummy = dummies
        .filter(|pool| pool[from] > 0)
        .map(|_| (0, EdgePayload::Dummy));
    match (real, dummy) {
        (Some(r), Some(d)) => Some(if r.0 <= 0 { r } else { d }),
        (r, d) => r.or(d),
    }
}

fn build<F>(index: &SubspaceIndex, anchor: usize, dummies: Option<&[usize]>, mut closing: F) -> AuxGraph
where
    F: FnMut(usize) -> Option<(Cost, EdgePayload)>,
{
    let k = index.k();
    let mut graph = AuxGraph::empty(k, anchor);
    for to in 0..=k {
        if to != anchor {
            for from in (0..k).filter(|&u| u != to && (u != anchor || to != k)) {
                let found = if to == k {
                    closing(from)
                } else {
                    best_move(index, dummies, from, to)
                };
                if let Some((cost, payload)) = found {
                    graph.edges.push(AuxEdge {
                        from,
                        to,
                        cost,
                        payload,
                    });
                }
            }
        }
        graph.offsets[to + 1] = graph.edges.len();
    }
    graph
}

/// The negative-cycle graph for `anchor`: per-pair cheapest transfers, with
/// transfers out of the anchor leaving its out-copy and transfers into the
/// anchor entering its in-copy. Pairs without a transferable unit get no
/// edge.
pub fn build_negcycle_graph(index: &SubspaceIndex, anchor: usize, dummies: Option<&[usize]>) -> AuxGraph {
    build(index, anchor, dummies, |from| {
        best_move(index, dummies, from, anchor)
    })
}

/// The negative-path graph for an overloaded `anchor`: the transfer edges of
/// the negative-cycle graph except those into the anchor, plus a penalty
/// edge from every other center `u` into the in-copy costing the next
/// penalty at `u` minus the refund at the anchor.
pub fn build_negpath_graph(
    index: &SubspaceIndex,
    allotment: &Allotment,
    instance: &ProblemInstance,
    anchor: usize,
) -> Result<AuxGraph> {
    let centers = &instance.centers;
    let anchor_load = allotment.load(anchor);
    if anchor_load <= centers[anchor].capacity {
        return Err(Error::AnchorNotOverloaded { anchor });
    }
    let refund = refund_penalty(&centers[anchor], anchor_load);
    Ok(build(index, anchor, None, |from| {
        let gain = marginal_penalty(&centers[from], allotment.load(from));
        Some((gain - refund, EdgePayload::Penalty))
    }))
}
