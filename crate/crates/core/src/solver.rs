//! The incremental re-adjustment solver, its strict-capacity variant and a
//! greedy baseline.
//!
//! All three process demands in ascending order of their cheapest
//! assignment cost (ties by demand index) and place each demand at its
//! cheapest center (ties by center index). The re-adjustment solver then
//! removes the most negative cycle through that center and, when the
//! placement overloaded it, the most negative path out of it.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::engine::{Clock, Engine};
use crate::model::{
    marginal_penalty, partial_objective, Allotment, Cost, CostMatrix, PenaltySpec,
    ProblemInstance, ServiceCenter,
};
use crate::refine::{collapsed_has_negative_cycle, negative_cycle_refine, negative_path_refine};
use crate::subspace::SubspaceIndex;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Asral,
    ParaAsral,
    Strict,
    Greedy,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Asral,
        SolverKind::ParaAsral,
        SolverKind::Strict,
        SolverKind::Greedy,
        SolverKind::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Asral => "asral",
            SolverKind::ParaAsral => "para-asral",
            SolverKind::Strict => "strict",
            SolverKind::Greedy => "greedy",
            SolverKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Returned when a string names no solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownSolver;

impl fmt::Display for UnknownSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown solver; expected asral, para-asral, strict, greedy or oracle")
    }
}

impl core::error::Error for UnknownSolver {}

impl core::str::FromStr for SolverKind {
    type Err = UnknownSolver;

    fn from_str(s: &str) -> core::result::Result<Self, UnknownSolver> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(UnknownSolver)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Repeat the negative-path step at an overloaded center until it no
    /// longer improves.
    pub refine_to_fixpoint: bool,
    /// Run the no-negative-cycle check after every refinement step and fail
    /// on the first violation.
    pub check_invariants: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub iterations: usize,
    pub cycle_searches: usize,
    pub path_searches: usize,
    pub negative_cycles_removed: usize,
    pub negative_paths_removed: usize,
    pub transfers_applied: usize,
    /// Total objective reduction from refinements.
    pub refinement_gain: Cost,
    pub invariant_checks: usize,
}

/// Wall-clock breakdown in nanoseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Timings {
    pub index_update_ns: u64,
    pub bellman_ford_ns: u64,
    pub other_ns: u64,
    pub total_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub solver: SolverKind,
    /// Assignment cost plus overload penalties of `assignment`. For strict
    /// solves with excess demand this excludes the overflow surcharge.
    pub objective: Cost,
    pub assignment: Allotment,
    /// Strict mode only: `(n - total capacity) * (max cost + 1)` when demand
    /// exceeds capacity, else zero.
    pub surcharge: Cost,
    /// Strict mode only: demands routed to the overflow center, left
    /// unassigned in `assignment`.
    pub unserved: Vec<usize>,
    pub stats: SolveStats,
    pub timings: Timings,
}

/// Mutable state of an incremental solve.
#[derive(Debug, Clone)]
pub struct SolverState<'a> {
    pub instance: &'a ProblemInstance,
    pub allotment: Allotment,
    pub index: SubspaceIndex,
    /// Running objective of the demands placed so far.
    pub delta: Cost,
    /// Strict mode: zero-cost placeholder units per center.
    pub dummies: Option<Vec<usize>>,
    pub stats: SolveStats,
    pub timings: Timings,
}

impl<'a> SolverState<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        Self {
            instance,
            allotment: Allotment::new(instance.n(), instance.k()),
            index: SubspaceIndex::new(instance.n(), instance.k()),
            delta: 0,
            dummies: None,
            stats: SolveStats::default(),
            timings: Timings::default(),
        }
    }

    /// Starts from an existing (possibly partial) allotment.
    pub fn from_allotment(instance: &'a ProblemInstance, allotment: Allotment) -> Result<Self> {
        let delta = partial_objective(instance, &allotment)?;
        let index = SubspaceIndex::build(&instance.cost_matrix, &allotment);
        Ok(Self {
            instance,
            allotment,
            index,
            delta,
            dummies: None,
            stats: SolveStats::default(),
            timings: Timings::default(),
        })
    }

    pub fn remaining_capacity(&self, center: usize) -> usize {
        self.instance.centers[center]
            .capacity
            .saturating_sub(self.allotment.load(center))
    }

    /// Places an unassigned demand at `center`, charging its assignment
    /// cost and the next penalty increment there.
    pub fn add_demand<C: Clock + ?Sized>(&mut self, demand: usize, center: usize, clock: &C) -> Result<Cost> {
        let added = self
            .instance
            .cost(demand, center)
            .checked_add(marginal_penalty(
                &self.instance.centers[center],
                self.allotment.load(center),
            ))
            .ok_or(Error::Overflow)?;
        self.allotment.assign(demand, center)?;
        let t = clock.now_nanos();
        self.index
            .insert_demand(&self.instance.cost_matrix, demand, center)?;
        self.timings.index_update_ns += clock.now_nanos().saturating_sub(t);
        self.delta = self.delta.checked_add(added).ok_or(Error::Overflow)?;
        Ok(added)
    }

    fn check_invariant(&mut self, options: &SolveOptions, step: u8) -> Result<()> {
        if !options.check_invariants {
            return Ok(());
        }
        self.stats.invariant_checks += 1;
        if collapsed_has_negative_cycle(&self.index, self.dummies.as_deref()) {
            return Err(Error::InvariantViolation {
                iteration: self.stats.iterations,
                step,
            });
        }
        Ok(())
    }

    fn finish<C: Clock + ?Sized>(self, solver: SolverKind, started: u64, clock: &C) -> SolveReport {
        let mut timings = self.timings;
        timings.total_ns = clock.now_nanos().saturating_sub(started);
        timings.other_ns = timings
            .total_ns
            .saturating_sub(timings.index_update_ns + timings.bellman_ford_ns);
        SolveReport {
            solver,
            objective: self.delta,
            assignment: self.allotment,
            surcharge: 0,
            unserved: Vec::new(),
            stats: self.stats,
            timings,
        }
    }
}

/// Demands by ascending cheapest cost, ties by index, each paired with its
/// cheapest center.
fn min_distance_heap(cm: &CostMatrix) -> BinaryHeap<Reverse<(Cost, usize, usize)>> {
    (0..cm.rows())
        .map(|d| {
            let (s, c) = cm.best_center(d);
            Reverse((c, d, s))
        })
        .collect()
}

/// Runs the re-adjustment solver. `engine` decides how relaxation rounds and
/// heap updates execute; every engine yields the same report up to timings.
pub fn asral_solve<E: Engine + ?Sized, C: Clock + ?Sized>(
    instance: &ProblemInstance,
    options: &SolveOptions,
    engine: &E,
    clock: &C,
) -> Result<SolveReport> {
    instance.validate()?;
    let started = clock.now_nanos();
    let mut state = SolverState::new(instance);
    let mut queue = min_distance_heap(&instance.cost_matrix);
    while let Some(Reverse((_, demand, center))) = queue.pop() {
        state.stats.iterations += 1;
        let vacancy = state.remaining_capacity(center) > 0;
        state.add_demand(demand, center, clock)?;
        negative_cycle_refine(&mut state, center, engine, clock)?;
        state.check_invariant(options, 7)?;
        if !vacancy {
            loop {
                let improved = negative_path_refine(&mut state, center, engine, clock)?.is_some();
                if !(options.refine_to_fixpoint
                    && improved
                    && state.remaining_capacity(center) == 0
                    && state.allotment.load(center) > instance.centers[center].capacity)
                {
                    break;
                }
            }
            state.check_invariant(options, 14)?;
        }
    }
    Ok(state.finish(SolverKind::Asral, started, clock))
}

/// Places every demand at its cheapest center with no refinement, paying
/// penalties as they arise.
pub fn greedy_solve<C: Clock + ?Sized>(instance: &ProblemInstance, clock: &C) -> Result<SolveReport> {
    instance.validate()?;
    let started = clock.now_nanos();
    let mut allotment = Allotment::new(instance.n(), instance.k());
    let mut delta: Cost = 0;
    let mut iterations = 0;
    let mut queue = min_distance_heap(&instance.cost_matrix);
    while let Some(Reverse((cost, demand, center))) = queue.pop() {
        iterations += 1;
        let penalty = marginal_penalty(&instance.centers[center], allotment.load(center));
        delta = cost
            .checked_add(penalty)
            .and_then(|c| delta.checked_add(c))
            .ok_or(Error::Overflow)?;
        allotment.assign(demand, center)?;
    }
    let total_ns = clock.now_nanos().saturating_sub(started);
    Ok(SolveReport {
        solver: SolverKind::Greedy,
        objective: delta,
        assignment: allotment,
        surcharge: 0,
        unserved: Vec::new(),
        stats: SolveStats {
            iterations,
            ..SolveStats::default()
        },
        timings: Timings {
            other_ns: total_ns,
            total_ns,
            ..Timings::default()
        },
    })
}

/// Excess-demand preprocessing for strict mode: when demand exceeds total
/// capacity, returns the instance with an extra overflow center of capacity
/// `n - total capacity` whose cost column is `max cost + 1`, together with
/// the resulting constant surcharge.
pub fn strict_augmentation(instance: &ProblemInstance) -> Result<Option<(ProblemInstance, Cost)>> {
    let n = instance.n();
    let capacity = instance.total_capacity();
    if capacity >= n {
        return Ok(None);
    }
    let k = instance.k();
    let overflow_cost = instance
        .cost_matrix
        .max_entry()
        .and_then(|m| m.checked_add(1))
        .ok_or(Error::Overflow)?;
    let mut data = Vec::with_capacity(n * (k + 1));
    for d in 0..n {
        data.extend_from_slice(instance.cost_matrix.row(d));
        data.push(overflow_cost);
    }
    let mut centers = instance.centers.clone();
    centers.push(ServiceCenter::new(k, n - capacity, PenaltySpec::Constant(1)));
    let surcharge = Cost::try_from(n - capacity)
        .ok()
        .and_then(|excess| excess.checked_mul(overflow_cost))
        .ok_or(Error::Overflow)?;
    let augmented = ProblemInstance {
        centers,
        demand_count: n,
        cost_matrix: CostMatrix::new(n, k + 1, data).expect("dimensions match"),
    };
    Ok(Some((augmented, surcharge)))
}

/// Optimal solver for the strict-capacity problem, processing demands by
/// ascending index.
pub fn strict_solve<E: Engine + ?Sized, C: Clock + ?Sized>(
    instance: &ProblemInstance,
    options: &SolveOptions,
    engine: &E,
    clock: &C,
) -> Result<SolveReport> {
    let order: Vec<usize> = (0..instance.n()).collect();
    strict_solve_in_order(instance, &order, options, engine, clock)
}

/// Strict solver with an explicit demand processing order. `order` must be
/// a permutation of `0..n`.
pub fn strict_solve_in_order<E: Engine + ?Sized, C: Clock + ?Sized>(
    instance: &ProblemInstance,
    order: &[usize],
    options: &SolveOptions,
    engine: &E,
    clock: &C,
) -> Result<SolveReport> {
    instance.validate()?;
    let n = instance.n();
    if order.len() != n {
        return Err(Error::IncompleteAllotment {
            demand: order.len().min(n),
        });
    }
    let started = clock.now_nanos();
    let augmentation = strict_augmentation(instance)?;
    let (work, surcharge) = match &augmentation {
        Some((augmented, surcharge)) => (augmented, *surcharge),
        None => (instance, 0),
    };
    let k = work.k();

    let mut state = SolverState::new(work);
    state.dummies = Some(work.centers.iter().map(|c| c.capacity).collect());
    for &demand in order {
        state.stats.iterations += 1;
        let pool = state.dummies.as_mut().expect("strict state has placeholders");
        let row = work.cost_matrix.row(demand);
        let center = (0..k)
            .filter(|&s| pool[s] > 0)
            .min_by_key(|&s| (row[s], s))
            .ok_or(Error::StrictInfeasible {
                demand: n,
                capacity: instance.total_capacity(),
            })?;
        pool[center] -= 1;
        state.add_demand(demand, center, clock)?;
        negative_cycle_refine(&mut state, center, engine, clock)?;
        state.check_invariant(options, 8)?;
    }

    let mut report = state.finish(SolverKind::Strict, started, clock);
    if augmentation.is_some() {
        let overflow = k - 1;
        let mut real = Allotment::new(n, overflow);
        for d in 0..n {
            match report.assignment.center_of(d) {
                Some(s) if s == overflow => report.unserved.push(d),
                Some(s) => real.assign(d, s)?,
                None => return Err(Error::IncompleteAllotment { demand: d }),
            }
        }
        report.assignment = real;
        report.surcharge = surcharge;
        report.objective = report
            .objective
            .checked_sub(surcharge)
            .ok_or(Error::Overflow)?;
    }
    Ok(report)
}
