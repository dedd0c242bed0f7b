//! Exact reference solver: min-cost flow by successive shortest paths.
//!
//! Network: source -> each demand (capacity 1), demand -> each center
//! (capacity 1, assignment cost), center -> sink. A center's sink side is
//! one arc of its capacity at cost zero plus, in penalized mode, one unit
//! arc per possible overload unit costing that unit's penalty. Penalties
//! are non-decreasing, so the cheapest flow fills them in order and the
//! flow cost equals the objective.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::model::{evaluate_objective, Allotment, Cost, ProblemInstance};
use crate::solver::strict_augmentation;
use crate::{Error, Result};

/// Largest instance [`oracle_solve`] accepts.
pub const ORACLE_DEMAND_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Overloads allowed at their penalty.
    Penalized,
    /// Hard capacities; fails if demand exceeds total capacity.
    Strict,
    /// Hard capacities with the same overflow center the strict solver adds
    /// when demand exceeds capacity.
    StrictAugmented,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    /// Optimal value. In augmented mode this includes the surcharge.
    pub objective: Cost,
    /// Assignment over the instance's own centers.
    pub assignment: Allotment,
    /// Augmented mode: demands placed at the overflow center.
    pub unserved: Vec<usize>,
    pub surcharge: Cost,
}

pub fn oracle_solve(instance: &ProblemInstance, mode: OracleMode) -> Result<OracleSolution> {
    oracle_solve_with_limit(instance, mode, ORACLE_DEMAND_LIMIT)
}

pub fn oracle_solve_with_limit(
    instance: &ProblemInstance,
    mode: OracleMode,
    limit: usize,
) -> Result<OracleSolution> {
    instance.validate()?;
    let n = instance.n();
    if n > limit {
        return Err(Error::OracleTooLarge { n, limit });
    }
    match mode {
        OracleMode::Penalized => {
            let assignment = min_cost_assignment(instance, true)?;
            let objective = evaluate_objective(instance, &assignment)?;
            Ok(OracleSolution {
                objective,
                assignment,
                unserved: Vec::new(),
                surcharge: 0,
            })
        }
        OracleMode::Strict => {
            if instance.total_capacity() < n {
                return Err(Error::StrictInfeasible {
                    demand: n,
                    capacity: instance.total_capacity(),
                });
            }
            let assignment = min_cost_assignment(instance, false)?;
            let objective = evaluate_objective(instance, &assignment)?;
            Ok(OracleSolution {
                objective,
                assignment,
                unserved: Vec::new(),
                surcharge: 0,
            })
        }
        OracleMode::StrictAugmented => {
            let Some((augmented, surcharge)) = strict_augmentation(instance)? else {
                return oracle_solve_with_limit(instance, OracleMode::Strict, limit);
            };
            let full = min_cost_assignment(&augmented, false)?;
            let objective = evaluate_objective(&augmented, &full)?;
            let overflow = instance.k();
            let mut assignment = Allotment::new(n, overflow);
            let mut unserved = Vec::new();
            for d in 0..n {
                match full.center_of(d) {
                    Some(s) if s == overflow => unserved.push(d),
                    Some(s) => assignment.assign(d, s)?,
                    None => return Err(Error::IncompleteAllotment { demand: d }),
                }
            }
            Ok(OracleSolution {
                objective,
                assignment,
                unserved,
                surcharge,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: u32,
    cap: u32,
    cost: Cost,
}

/// Residual network with paired arcs: arc `i ^ 1` is the reverse of `i`.
struct FlowNetwork {
    arcs: Vec<Arc>,
    adjacency: Vec<Vec<u32>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adjacency: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32, cost: Cost) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to: to as u32,
            cap,
            cost,
        });
        self.arcs.push(Arc {
            to: from as u32,
            cap: 0,
            cost: -cost,
        });
        self.adjacency[from].push(id as u32);
        self.adjacency[to].push(id as u32 + 1);
        id
    }

    /// Pushes `units` one augmenting path at a time. Initial costs must be
    /// non-negative so zero potentials are feasible.
    fn push_flow(&mut self, source: usize, sink: usize, units: usize) -> Result<()> {
        let nodes = self.adjacency.len();
        let mut potential: Vec<Cost> = vec![0; nodes];
        let mut dist: Vec<Cost> = vec![Cost::MAX; nodes];
        let mut via: Vec<u32> = vec![u32::MAX; nodes];
        let mut queue = BinaryHeap::new();
        for _ in 0..units {
            dist.fill(Cost::MAX);
            via.fill(u32::MAX);
            dist[source] = 0;
            queue.push(Reverse((0 as Cost, source as u32)));
            while let Some(Reverse((d, u))) = queue.pop() {
                let u = u as usize;
                if d > dist[u] {
                    continue;
                }
                for &a in &self.adjacency[u] {
                    let arc = self.arcs[a as usize];
                    if arc.cap == 0 {
                        continue;
                    }
                    let v = arc.to as usize;
                    let reduced = arc.cost + potential[u] - potential[v];
                    let nd = d.checked_add(reduced).ok_or(Error::Overflow)?;
                    if nd < dist[v] {
                        dist[v] = nd;
                        via[v] = a;
                        queue.push(Reverse((nd, v as u32)));
                    }
                }
            }
            if dist[sink] == Cost::MAX {
                return Err(Error::StrictInfeasible {
                    demand: units,
                    capacity: 0,
                });
            }
            for (p, &d) in potential.iter_mut().zip(&dist) {
                if d != Cost::MAX {
                    *p += d;
                }
            }
            let mut v = sink;
            while v != source {
                let a = via[v] as usize;
                self.arcs[a].cap -= 1;
                self.arcs[a ^ 1].cap += 1;
                v = self.arcs[a ^ 1].to as usize;
            }
        }
        Ok(())
    }
}

fn min_cost_assignment(instance: &ProblemInstance, penalized: bool) -> Result<Allotment> {
    let (n, k) = (instance.n(), instance.k());
    let source = 0;
    let demand_node = |d: usize| 1 + d;
    let center_node = |s: usize| 1 + n + s;
    let sink = 1 + n + k;
    let mut net = FlowNetwork::new(n + k + 2);
    for d in 0..n {
        net.add_arc(source, demand_node(d), 1, 0);
    }
    let mut assignment_arcs = Vec::with_capacity(n * k);
    for d in 0..n {
        for s in 0..k {
            let id = net.add_arc(demand_node(d), center_node(s), 1, instance.cost(d, s));
            assignment_arcs.push(id);
        }
    }
    for (s, center) in instance.centers.iter().enumerate() {
        let base = center.capacity.min(n);
        if base > 0 {
            net.add_arc(center_node(s), sink, base as u32, 0);
        }
        if penalized {
            for j in 1..=n - base {
                net.add_arc(center_node(s), sink, 1, center.penalty.penalty(j));
            }
        }
    }
    net.push_flow(source, sink, n).map_err(|e| match e {
        Error::StrictInfeasible { demand, .. } => Error::StrictInfeasible {
            demand,
            capacity: instance.total_capacity(),
        },
        other => other,
    })?;

    let mut allotment = Allotment::new(n, k);
    for d in 0..n {
        for s in 0..k {
            if net.arcs[assignment_arcs[d * k + s]].cap == 0 {
                allotment.assign(d, s)?;
            }
        }
    }
    Ok(allotment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostMatrix, PenaltySpec};
    use proptest::prelude::*;

    fn brute_force(instance: &ProblemInstance, strict: bool) -> Option<Cost> {
        let (n, k) = (instance.n(), instance.k());
        let mut best = None;
        let mut digits = vec![0usize; n];
        loop {
            let a = Allotment::from_assignment(k, &digits).unwrap();
            let feasible = !strict || (0..k).all(|s| a.load(s) <= instance.centers[s].capacity);
            if feasible {
                let v = evaluate_objective(instance, &a).unwrap();
                best = Some(best.map_or(v, |b: Cost| b.min(v)));
            }
            let mut i = 0;
            while i < n {
                digits[i] += 1;
                if digits[i] < k {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == n {
                return best;
            }
        }
    }

    fn small_instance() -> impl Strategy<Value = ProblemInstance> {
        (1usize..=3, 1usize..=5).prop_flat_map(|(k, n)| {
            let penalty = prop_oneof![
                (1i64..20).prop_map(PenaltySpec::Constant),
                (1i64..10, 0i64..6).prop_map(|(base, step)| PenaltySpec::Linear { base, step }),
            ];
            (
                proptest::collection::vec((0usize..=3, penalty), k),
                proptest::collection::vec(proptest::collection::vec(1i64..30, k), n),
            )
                .prop_map(|(centers, rows)| {
                    ProblemInstance::new(centers, CostMatrix::from_rows(&rows).unwrap())
                })
        })
    }

    #[test]
    fn reproduces_two_center_example() {
        let inst = ProblemInstance::new(
            vec![(1, PenaltySpec::Constant(3)), (1, PenaltySpec::Constant(3))],
            CostMatrix::from_rows(&[[1, 9], [2, 9], [9, 1]]).unwrap(),
        );
        assert_eq!(oracle_solve(&inst, OracleMode::Penalized).unwrap().objective, 7);
    }

    #[test]
    fn strict_rejects_excess_demand() {
        let inst = ProblemInstance::new(
            vec![(1, PenaltySpec::Constant(1))],
            CostMatrix::from_rows(&[[2], [3]]).unwrap(),
        );
        assert!(matches!(
            oracle_solve(&inst, OracleMode::Strict),
            Err(Error::StrictInfeasible { demand: 2, capacity: 1 })
        ));
        let aug = oracle_solve(&inst, OracleMode::StrictAugmented).unwrap();
        assert_eq!(aug.surcharge, 4);
        assert_eq!(aug.objective, 2 + 4);
        assert_eq!(aug.unserved, vec![1]);
    }

    #[test]
    fn limit_is_enforced() {
        let inst = ProblemInstance::new(
            vec![(1, PenaltySpec::Constant(1))],
            CostMatrix::from_rows(&[[2], [3], [4]]).unwrap(),
        );
        assert_eq!(
            oracle_solve_with_limit(&inst, OracleMode::Penalized, 2),
            Err(Error::OracleTooLarge { n: 3, limit: 2 })
        );
    }

    proptest! {
        #[test]
        fn penalized_matches_enumeration(inst in small_instance()) {
            let sol = oracle_solve(&inst, OracleMode::Penalized).unwrap();
            prop_assert!(sol.assignment.is_complete());
            prop_assert_eq!(Some(sol.objective), brute_force(&inst, false));
        }

        #[test]
        fn strict_matches_enumeration(inst in small_instance()) {
            match brute_force(&inst, true) {
                Some(best) => {
                    let sol = oracle_solve(&inst, OracleMode::Strict).unwrap();
                    prop_assert_eq!(sol.objective, best);
                }
                None => prop_assert!(oracle_solve(&inst, OracleMode::Strict).is_err()),
            }
        }
    }
}
