//! Lowest-cost paths on auxiliary graphs and the two refinement steps built
//! on them.
//!
//! Bellman-Ford runs in synchronous rounds: round `r + 1` reads only the
//! labels produced by round `r`. A node's label improves only on a strictly
//! smaller candidate, and among equal candidates the smallest source node
//! wins. Together these make the result independent of how a round is
//! scheduled.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Clock, Engine};
use crate::model::Cost;
use crate::solver::SolverState;
use crate::subspace::{
    apply_transfer, best_move, build_negcycle_graph, build_negpath_graph, AuxEdge, AuxGraph,
    EdgePayload, SubspaceIndex, TransferEdge,
};
use crate::{Error, Result};

/// Distance of a node not reached yet.
pub const UNREACHED: Cost = Cost::MAX;

/// Distance and predecessor-edge labels, one per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub dist: Vec<Cost>,
    /// Index into [`AuxGraph::edges`] of the edge that set `dist`.
    pub parent: Vec<Option<u32>>,
}

impl Labels {
    pub fn new(nodes: usize, source: usize) -> Self {
        let mut dist = vec![UNREACHED; nodes];
        dist[source] = 0;
        Self {
            dist,
            parent: vec![None; nodes],
        }
    }
}

/// Relaxed label of `node` given the previous round's labels.
#[inline]
pub fn relax_node(graph: &AuxGraph, input: &Labels, node: usize) -> (Cost, Option<u32>) {
    let mut best = input.dist[node];
    let mut parent = input.parent[node];
    let range = graph.incoming_range(node);
    for (offset, e) in graph.incoming(node).iter().enumerate() {
        let du = input.dist[e.from];
        if du == UNREACHED {
            continue;
        }
        let cand = du + e.cost;
        if cand < best {
            best = cand;
            parent = Some((range.start + offset) as u32);
        }
    }
    (best, parent)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathResult {
    pub cost: Cost,
    /// Edges from the anchor's out-copy to its in-copy.
    pub edges: Vec<AuxEdge>,
    pub distances: Vec<Cost>,
    pub parents: Vec<Option<u32>>,
    pub rounds: usize,
}

/// Final labels after Bellman-Ford from the anchor's out-copy.
pub fn shortest_labels<E: Engine + ?Sized>(graph: &AuxGraph, engine: &E) -> Result<(Labels, usize)> {
    let nodes = graph.node_count();
    let mut current = Labels::new(nodes, graph.anchor_out());
    let mut next = current.clone();
    let mut rounds = 0;
    if graph.edge_count() == 0 {
        return Ok((current, rounds));
    }
    loop {
        rounds += 1;
        let changed = engine.relax_round(graph, &current, &mut next);
        core::mem::swap(&mut current, &mut next);
        if !changed {
            break;
        }
        if rounds >= nodes {
            return Err(Error::NegativeCycle);
        }
    }
    Ok((current, rounds))
}

/// Cheapest path from the anchor's out-copy to its in-copy, or `None` when
/// the in-copy is unreachable. The graph must not contain a negative cycle.
pub fn lowest_cost_path<E: Engine + ?Sized>(graph: &AuxGraph, engine: &E) -> Result<Option<PathResult>> {
    let (labels, rounds) = shortest_labels(graph, engine)?;
    let target = graph.anchor_in();
    if labels.dist[target] == UNREACHED {
        return Ok(None);
    }
    let source = graph.anchor_out();
    let mut seen = vec![false; graph.node_count()];
    let mut edges = Vec::new();
    let mut node = target;
    while node != source {
        if core::mem::replace(&mut seen[node], true) {
            return Err(Error::NonSimplePath { node });
        }
        let e = labels.parent[node].ok_or(Error::NonSimplePath { node })?;
        let edge = *graph.edge(e as usize);
        node = edge.from;
        edges.push(edge);
    }
    edges.reverse();
    let cost = edges.iter().map(|e| e.cost).sum();
    debug_assert_eq!(cost, labels.dist[target]);
    Ok(Some(PathResult {
        cost,
        edges,
        distances: labels.dist,
        parents: labels.parent,
        rounds,
    }))
}

/// Whether the graph over centers whose `(u, v)` edge is the cheapest move
/// from `u` to `v` contains a negative-cost cycle.
pub fn collapsed_has_negative_cycle(index: &SubspaceIndex, dummies: Option<&[usize]>) -> bool {
    let k = index.k();
    let mut edges = Vec::new();
    for u in 0..k {
        for v in (0..k).filter(|&v| v != u) {
            if let Some((c, _)) = best_move(index, dummies, u, v) {
                edges.push((u, v, c));
            }
        }
    }
    // Distances start at zero, as if from a virtual source joined to every
    // center; k - 1 further rounds settle them absent a negative cycle.
    let mut dist = vec![0 as Cost; k];
    for round in 1..=k {
        let mut changed = false;
        for &(u, v, c) in &edges {
            if dist[u] + c < dist[v] {
                dist[v] = dist[u] + c;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
        if round == k {
            return true;
        }
    }
    false
}

fn apply_path<E: Engine + ?Sized, C: Clock + ?Sized>(
    state: &mut SolverState<'_>,
    graph: &AuxGraph,
    path: &PathResult,
    engine: &E,
    clock: &C,
) -> Result<()> {
    let cm = &state.instance.cost_matrix;
    for e in &path.edges {
        let from = graph.center_of_node(e.from);
        let to = graph.center_of_node(e.to);
        match e.payload {
            EdgePayload::Transfer(demand) => {
                let edge = TransferEdge {
                    from,
                    to,
                    demand,
                    cost: e.cost,
                };
                let t = clock.now_nanos();
                apply_transfer(&mut state.index, &mut state.allotment, cm, &edge, engine)?;
                state.timings.index_update_ns += clock.now_nanos().saturating_sub(t);
                state.stats.transfers_applied += 1;
            }
            EdgePayload::Dummy => {
                let pool = state
                    .dummies
                    .as_mut()
                    .expect("placeholder edges exist only in strict mode");
                pool[from] -= 1;
                pool[to] += 1;
            }
            EdgePayload::Penalty => {}
        }
        state.delta = state.delta.checked_add(e.cost).ok_or(Error::Overflow)?;
    }
    Ok(())
}

fn timed_path<E: Engine + ?Sized, C: Clock + ?Sized>(
    state: &mut SolverState<'_>,
    graph: &AuxGraph,
    engine: &E,
    clock: &C,
) -> Result<Option<PathResult>> {
    let t = clock.now_nanos();
    let path = lowest_cost_path(graph, engine);
    state.timings.bellman_ford_ns += clock.now_nanos().saturating_sub(t);
    Ok(path?.filter(|p| p.cost < 0))
}

/// Removes the most negative cycle through `anchor`, if its cost is below
/// zero. Returns the (negative) change applied to the objective.
pub fn negative_cycle_refine<E: Engine + ?Sized, C: Clock + ?Sized>(
    state: &mut SolverState<'_>,
    anchor: usize,
    engine: &E,
    clock: &C,
) -> Result<Option<Cost>> {
    state.stats.cycle_searches += 1;
    let graph = build_negcycle_graph(&state.index, anchor, state.dummies.as_deref());
    let Some(path) = timed_path(state, &graph, engine, clock)? else {
        return Ok(None);
    };
    apply_path(state, &graph, &path, engine, clock)?;
    state.stats.negative_cycles_removed += 1;
    state.stats.refinement_gain += -path.cost;
    Ok(Some(path.cost))
}

/// Moves one unit of overload away from `anchor` along the most negative
/// path, if its cost (transfers plus penalty swap) is below zero. Returns
/// the change applied to the objective.
pub fn negative_path_refine<E: Engine + ?Sized, C: Clock + ?Sized>(
    state: &mut SolverState<'_>,
    anchor: usize,
    engine: &E,
    clock: &C,
) -> Result<Option<Cost>> {
    state.stats.path_searches += 1;
    let graph = build_negpath_graph(&state.index, &state.allotment, state.instance, anchor)?;
    let Some(path) = timed_path(state, &graph, engine, clock)? else {
        return Ok(None);
    };
    debug_assert_eq!(path.edges.last().map(|e| e.payload), Some(EdgePayload::Penalty));
    apply_path(state, &graph, &path, engine, clock)?;
    state.stats.negative_paths_removed += 1;
    state.stats.refinement_gain += -path.cost;
    Ok(Some(path.cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{NoClock, SequentialEngine};
    use crate::model::{evaluate_objective, Allotment, CostMatrix, PenaltySpec, ProblemInstance};
    use proptest::prelude::*;

    fn transfer(from: usize, to: usize, cost: Cost) -> AuxEdge {
        AuxEdge {
            from,
            to,
            cost,
            payload: EdgePayload::Transfer(0),
        }
    }

    #[test]
    fn single_edge_path() {
        let g = AuxGraph::from_edges(1, 0, [transfer(0, 1, -13)]);
        let p = lowest_cost_path(&g, &SequentialEngine).unwrap().unwrap();
        assert_eq!(p.cost, -13);
        assert_eq!(p.edges.len(), 1);
    }

    #[test]
    fn unreachable_in_copy() {
        let g = AuxGraph::from_edges(3, 0, [transfer(0, 1, 2), transfer(2, 3, 1)]);
        assert_eq!(lowest_cost_path(&g, &SequentialEngine).unwrap(), None);
    }

    #[test]
    fn negative_cycle_is_reported() {
        // 1 -> 2 -> 1 costs -2.
        let g = AuxGraph::from_edges(
            3,
            0,
            [transfer(0, 1, 0), transfer(1, 2, -1), transfer(2, 1, -1), transfer(2, 3, 0)],
        );
        assert_eq!(lowest_cost_path(&g, &SequentialEngine), Err(Error::NegativeCycle));
    }

    #[test]
    fn equal_cost_paths_prefer_smaller_parent() {
        let g = AuxGraph::from_edges(
            3,
            0,
            [transfer(0, 1, 1), transfer(0, 2, 1), transfer(1, 3, 1), transfer(2, 3, 1)],
        );
        let p = lowest_cost_path(&g, &SequentialEngine).unwrap().unwrap();
        assert_eq!(p.edges[0].to, 1);
    }

    /// Exhaustive minimum over simple paths from the out-copy to the in-copy.
    fn brute_force(g: &AuxGraph) -> Option<Cost> {
        fn walk(g: &AuxGraph, node: usize, seen: &mut Vec<bool>, cost: Cost, best: &mut Option<Cost>) {
            if node == g.anchor_in() {
                *best = Some(best.map_or(cost, |b| b.min(cost)));
                return;
            }
            for e in g.edges().iter().filter(|e| e.from == node) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    walk(g, e.to, seen, cost + e.cost, best);
                    seen[e.to] = false;
                }
            }
        }
        let mut seen = vec![false; g.node_count()];
        seen[g.anchor_out()] = true;
        let mut best = None;
        walk(g, g.anchor_out(), &mut seen, 0, &mut best);
        best
    }

    /// Floyd-Warshall negative-cycle check over the non-anchor nodes.
    fn has_negative_cycle(g: &AuxGraph) -> bool {
        let n = g.node_count();
        let inf = Cost::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for e in g.edges() {
            d[e.from][e.to] = d[e.from][e.to].min(e.cost);
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][m] < inf && d[m][j] < inf && d[i][m] + d[m][j] < d[i][j] {
                        d[i][j] = d[i][m] + d[m][j];
                    }
                }
            }
        }
        (0..n).any(|i| d[i][i] < 0)
    }

    fn graph_strategy() -> impl Strategy<Value = AuxGraph> {
        (1usize..=6).prop_flat_map(|k| {
            (
                Just(k),
                0..k,
                proptest::collection::vec((0..=k, 0..=k, -20i64..=20, any::<bool>()), 0..40),
            )
                .prop_map(|(k, anchor, raw)| {
                    AuxGraph::from_edges(
                        k,
                        anchor,
                        raw.into_iter()
                            .filter(|r| r.3)
                            .map(|(u, v, c, _)| transfer(u, v, c)),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn lowest_cost_path_matches_enumeration(g in graph_strategy()) {
            prop_assume!(!has_negative_cycle(&g));
            let found = lowest_cost_path(&g, &SequentialEngine).unwrap();
            prop_assert_eq!(found.as_ref().map(|p| p.cost), brute_force(&g));
            if let Some(p) = found {
                prop_assert!(p.rounds <= g.node_count());
                prop_assert_eq!(p.edges.first().unwrap().from, g.anchor_out());
                prop_assert_eq!(p.edges.last().unwrap().to, g.anchor_in());
                for w in p.edges.windows(2) {
                    prop_assert_eq!(w[0].to, w[1].from);
                }
                let mut nodes: Vec<_> = p.edges.iter().map(|e| e.to).collect();
                nodes.sort_unstable();
                nodes.dedup();
                prop_assert_eq!(nodes.len(), p.edges.len());
            }
        }
    }

    /// The four-center cycle where moving B, C, D, E one step around saves
    /// 4 + 3 + 5 + 1 = 13.
    pub(crate) fn cycle_13() -> (ProblemInstance, Allotment) {
        let cm = CostMatrix::from_rows(&[
            [10, 6, 50, 50],
            [50, 10, 7, 50],
            [50, 50, 10, 5],
            [9, 50, 50, 10],
        ])
        .unwrap();
        let inst = ProblemInstance::new(vec![(1, PenaltySpec::Constant(100)); 4], cm);
        (inst, Allotment::from_assignment(4, &[0, 1, 2, 3]).unwrap())
    }

    /// Center 1 is overloaded; moving C to center 2, D to center 3, H to
    /// center 0 saves 3 in transfers and 40 - 10 in penalties.
    pub(crate) fn path_33() -> (ProblemInstance, Allotment) {
        let cm = CostMatrix::from_rows(&[
            [10, 200, 200, 200], // A
            [200, 10, 9, 200],   // C
            [200, 10, 200, 200], // X
            [200, 200, 10, 9],   // D
            [9, 200, 200, 10],   // H
        ])
        .unwrap();
        let inst = ProblemInstance::new(
            vec![
                (1, PenaltySpec::Constant(10)),
                (1, PenaltySpec::Constant(40)),
                (1, PenaltySpec::Constant(100)),
                (1, PenaltySpec::Constant(100)),
            ],
            cm,
        );
        (inst, Allotment::from_assignment(4, &[0, 1, 1, 2, 3]).unwrap())
    }

    #[test]
    fn cycle_of_minus_13_saves_13() {
        let (inst, a) = cycle_13();
        let mut state = SolverState::from_allotment(&inst, a).unwrap();
        let before = evaluate_objective(&inst, &state.allotment).unwrap();
        let gain = negative_cycle_refine(&mut state, 0, &SequentialEngine, &NoClock).unwrap();
        assert_eq!(gain, Some(-13));
        let after = evaluate_objective(&inst, &state.allotment).unwrap();
        assert_eq!(before - after, 13);
        assert_eq!(state.delta, after);
        assert_eq!(state.allotment.loads(), &[1, 1, 1, 1]);
        assert!(!collapsed_has_negative_cycle(&state.index, None));
    }

    #[test]
    fn path_of_minus_33_saves_33() {
        let (inst, a) = path_33();
        let mut state = SolverState::from_allotment(&inst, a).unwrap();
        let before = state.delta;
        assert_eq!(before, 90);
        let gain = negative_path_refine(&mut state, 1, &SequentialEngine, &NoClock).unwrap();
        assert_eq!(gain, Some(-33));
        assert_eq!(evaluate_objective(&inst, &state.allotment).unwrap(), before - 33);
        assert_eq!(state.delta, before - 33);
        assert_eq!(state.allotment.loads(), &[2, 1, 1, 1]);
    }

    #[test]
    fn fresh_row_minimum_assignment_needs_no_cycle_refinement() {
        let cm = CostMatrix::from_rows(&[[3, 8, 5]]).unwrap();
        let inst = ProblemInstance::new(vec![(1, PenaltySpec::Constant(1)); 3], cm);
        let a = Allotment::from_assignment(3, &[0]).unwrap();
        let mut state = SolverState::from_allotment(&inst, a.clone()).unwrap();
        assert_eq!(negative_cycle_refine(&mut state, 0, &SequentialEngine, &NoClock), Ok(None));
        assert_eq!(state.allotment, a);
    }

    #[test]
    fn overload_absorbed_by_free_center_at_zero_transfer_cost() {
        // Both demands cost the same everywhere, so the path is a zero-cost
        // transfer followed by the refund at the anchor.
        let cm = CostMatrix::from_rows(&[[5, 5], [5, 5]]).unwrap();
        let inst = ProblemInstance::new(
            vec![(1, PenaltySpec::Constant(12)), (1, PenaltySpec::Constant(30))],
            cm,
        );
        let a = Allotment::from_assignment(2, &[0, 0]).unwrap();
        let mut state = SolverState::from_allotment(&inst, a).unwrap();
        let before = state.delta;
        let gain = negative_path_refine(&mut state, 0, &SequentialEngine, &NoClock).unwrap();
        assert_eq!(gain, Some(-12));
        assert_eq!(evaluate_objective(&inst, &state.allotment).unwrap(), before - 12);
    }

    fn random_state(
        rows: &[Vec<Cost>],
        asg: &[usize],
        caps: &[usize],
        pens: &[Cost],
    ) -> (ProblemInstance, Allotment) {
        let k = caps.len();
        let inst = ProblemInstance::new(
            caps.iter()
                .zip(pens)
                .map(|(&c, &p)| (c, PenaltySpec::Linear { base: p, step: 1 }))
                .collect(),
            CostMatrix::from_rows(rows).unwrap(),
        );
        let a = Allotment::from_assignment(k, &asg.iter().map(|s| s % k).collect::<Vec<_>>()).unwrap();
        (inst, a)
    }

    /// Drives a state the way the main loop does: add demands one at a time
    /// and refine at the receiving center, so the preconditions hold.
    fn incremental<'a>(inst: &'a ProblemInstance, order: &[(usize, usize)]) -> SolverState<'a> {
        let mut state = SolverState::new(inst);
        for &(d, s) in order {
            state.add_demand(d, s, &NoClock).unwrap();
            negative_cycle_refine(&mut state, s, &SequentialEngine, &NoClock).unwrap();
            if state.allotment.load(s) > inst.centers[s].capacity {
                negative_path_refine(&mut state, s, &SequentialEngine, &NoClock).unwrap();
            }
        }
        state
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn cycle_refinement_leaves_no_negative_cycle(
            rows in proptest::collection::vec(proptest::collection::vec(1i64..60, 5), 1..40),
            asg in proptest::collection::vec(0usize..5, 40),
            k in 2usize..=5,
        ) {
            let rows: Vec<Vec<Cost>> = rows.into_iter().map(|r| r[..k].to_vec()).collect();
            let (inst, _) = random_state(&rows, &asg[..rows.len()], &vec![rows.len(); k], &vec![1; k]);
            let order: Vec<_> = (0..rows.len()).map(|d| (d, asg[d] % k)).collect();
            let state = incremental(&inst, &order);
            prop_assert!(!collapsed_has_negative_cycle(&state.index, None));
            prop_assert_eq!(state.delta, evaluate_objective(&inst, &state.allotment).unwrap());
        }

        #[test]
        fn path_refinement_keeps_exact_objective(
            rows in proptest::collection::vec(proptest::collection::vec(1i64..60, 5), 2..40),
            asg in proptest::collection::vec(0usize..5, 40),
            caps in proptest::collection::vec(0usize..6, 5),
            pens in proptest::collection::vec(1i64..80, 5),
            k in 2usize..=5,
        ) {
            let rows: Vec<Vec<Cost>> = rows.into_iter().map(|r| r[..k].to_vec()).collect();
            let n = rows.len();
            let (inst, _) = random_state(&rows, &asg[..n], &caps[..k], &pens[..k]);
            let prefix: Vec<_> = (0..n - 1).map(|d| (d, asg[d] % k)).collect();
            let mut state = incremental(&inst, &prefix);
            // Last demand goes wherever it overloads, then both refinements.
            let s = (0..k).find(|&s| state.allotment.load(s) >= caps[s]).unwrap_or(0);
            state.add_demand(n - 1, s, &NoClock).unwrap();
            let before = state.delta;
            let loads = state.allotment.loads().to_vec();
            negative_cycle_refine(&mut state, s, &SequentialEngine, &NoClock).unwrap();
            prop_assert_eq!(state.allotment.loads(), &loads[..]);
            let mid = state.delta;
            prop_assert!(mid <= before);
            if state.allotment.load(s) > caps[s] {
                let moved = negative_path_refine(&mut state, s, &SequentialEngine, &NoClock).unwrap();
                prop_assert!(state.delta <= mid);
                if moved.is_some() {
                    let changed: Vec<_> = (0..k).filter(|&c| state.allotment.load(c) != loads[c]).collect();
                    prop_assert_eq!(changed.len(), 2);
                    prop_assert_eq!(state.allotment.load(s) + 1, loads[s]);
                }
            }
            prop_assert_eq!(state.delta, evaluate_objective(&inst, &state.allotment).unwrap());
            prop_assert!(!collapsed_has_negative_cycle(&state.index, None));
            prop_assert!(state.index.matches_rebuild(&inst.cost_matrix, &state.allotment));
        }
    }
}
