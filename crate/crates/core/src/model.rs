//! Problem instances, penalty functions and objective evaluation.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Cost in abstract integer units. Assignment costs are positive; transfer
/// costs and penalty differences may be negative.
pub type Cost = i64;

/// Overload penalty `q(j)`: the extra cost of the `j`-th allotment beyond
/// capacity, `j >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PenaltySpec {
    Constant(Cost),
    Linear { base: Cost, step: Cost },
    /// Values past the end of the table repeat the last entry.
    Table(Vec<Cost>),
}

impl PenaltySpec {
    /// `q(j)` for `j >= 1`. `j = 0` is treated as `j = 1`.
    pub fn penalty(&self, j: usize) -> Cost {
        let j = j.max(1);
        match self {
            PenaltySpec::Constant(p) => *p,
            PenaltySpec::Linear { base, step } => {
                let j = Cost::try_from(j - 1).unwrap_or(Cost::MAX);
                base.saturating_add(step.saturating_mul(j))
            }
            PenaltySpec::Table(values) => match values.get(j - 1) {
                Some(v) => *v,
                None => values.last().copied().unwrap_or(0),
            },
        }
    }

    /// `q(1) + ... + q(count)`.
    pub fn total(&self, count: usize) -> Option<Cost> {
        match self {
            PenaltySpec::Constant(p) => p.checked_mul(Cost::try_from(count).ok()?),
            _ => (1..=count).try_fold(0 as Cost, |acc, j| acc.checked_add(self.penalty(j))),
        }
    }

    fn issues(&self, center: usize, horizon: usize, out: &mut Vec<ValidationIssue>) {
        match self {
            PenaltySpec::Constant(p) => {
                if *p <= 0 {
                    out.push(ValidationIssue::NonPositivePenalty { center });
                }
            }
            PenaltySpec::Linear { base, step } => {
                if *base <= 0 {
                    out.push(ValidationIssue::NonPositivePenalty { center });
                }
                if *step < 0 {
                    out.push(ValidationIssue::PenaltyNotMonotone { center });
                }
                let reach = Cost::try_from(horizon)
                    .ok()
                    .and_then(|h| step.checked_mul(h))
                    .and_then(|s| base.checked_add(s));
                if reach.is_none() {
                    out.push(ValidationIssue::PenaltyOverflow { center });
                }
            }
            PenaltySpec::Table(values) => {
                if values.is_empty() || values.iter().any(|v| *v <= 0) {
                    out.push(ValidationIssue::NonPositivePenalty { center });
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    out.push(ValidationIssue::PenaltyNotMonotone { center });
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceCenter {
    pub id: usize,
    pub capacity: usize,
    pub penalty: PenaltySpec,
}

impl ServiceCenter {
    pub fn new(id: usize, capacity: usize, penalty: PenaltySpec) -> Self {
        Self {
            id,
            capacity,
            penalty,
        }
    }
}

/// Dense row-major `n x k` table of assignment costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cost>,
}

impl CostMatrix {
    /// Builds a matrix from `rows * cols` row-major entries. Returns `None`
    /// when the length does not match.
    pub fn new(rows: usize, cols: usize, data: Vec<Cost>) -> Option<Self> {
        (rows.checked_mul(cols)? == data.len()).then_some(Self { rows, cols, data })
    }

    /// Returns `None` for ragged input.
    pub fn from_rows<R: AsRef<[Cost]>>(rows: &[R]) -> Option<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return None;
            }
            data.extend_from_slice(r);
        }
        Some(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn get(&self, demand: usize, center: usize) -> Cost {
        self.data[demand * self.cols + center]
    }

    #[inline]
    pub fn row(&self, demand: usize) -> &[Cost] {
        &self.data[demand * self.cols..(demand + 1) * self.cols]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn max_entry(&self) -> Option<Cost> {
        self.data.iter().copied().max()
    }

    /// The cheapest center for a demand, smallest index on ties.
    pub fn best_center(&self, demand: usize) -> (usize, Cost) {
        let row = self.row(demand);
        let mut best = 0;
        for (s, &c) in row.iter().enumerate().skip(1) {
            if c < row[best] {
                best = s;
            }
        }
        (best, row[best])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub centers: Vec<ServiceCenter>,
    pub demand_count: usize,
    pub cost_matrix: CostMatrix,
}

impl ProblemInstance {
    /// Assigns center ids `0..k` in order.
    pub fn new(capacities_and_penalties: Vec<(usize, PenaltySpec)>, cost_matrix: CostMatrix) -> Self {
        let centers = capacities_and_penalties
            .into_iter()
            .enumerate()
            .map(|(id, (capacity, penalty))| ServiceCenter::new(id, capacity, penalty))
            .collect();
        Self {
            centers,
            demand_count: cost_matrix.rows(),
            cost_matrix,
        }
    }

    pub fn n(&self) -> usize {
        self.demand_count
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn total_capacity(&self) -> usize {
        self.centers.iter().map(|c| c.capacity).sum()
    }

    #[inline]
    pub fn cost(&self, demand: usize, center: usize) -> Cost {
        self.cost_matrix.get(demand, center)
    }

    pub fn validate(&self) -> Result<()> {
        validate_instance(self).map_err(Error::InvalidInstance)
    }
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    NoCenters,
    NoDemands,
    CenterIdGap { position: usize, id: usize },
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    NonPositiveCost { demand: usize, center: usize, value: Cost },
    NonPositivePenalty { center: usize },
    PenaltyNotMonotone { center: usize },
    PenaltyOverflow { center: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::NoCenters => write!(f, "instance has no service centers"),
            ValidationIssue::NoDemands => write!(f, "instance has no demand units"),
            ValidationIssue::CenterIdGap { position, id } => {
                write!(f, "center at position {position} has id {id}")
            }
            ValidationIssue::DimensionMismatch {
                expected_rows,
                expected_cols,
                rows,
                cols,
            } => write!(
                f,
                "dimension mismatch: cost matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}"
            ),
            ValidationIssue::NonPositiveCost {
                demand,
                center,
                value,
            } => write!(
                f,
                "non-positive cost {value} for demand {demand} at center {center}"
            ),
            ValidationIssue::NonPositivePenalty { center } => {
                write!(f, "non-positive penalty at center {center}")
            }
            ValidationIssue::PenaltyNotMonotone { center } => {
                write!(f, "penalty not monotone at center {center}")
            }
            ValidationIssue::PenaltyOverflow { center } => {
                write!(f, "penalty at center {center} overflows over the demand horizon")
            }
        }
    }
}

/// Checks every structural invariant of an instance and reports all
/// violations found.
pub fn validate_instance(instance: &ProblemInstance) -> core::result::Result<(), Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    let k = instance.k();
    let n = instance.n();
    if k == 0 {
        issues.push(ValidationIssue::NoCenters);
    }
    if n == 0 {
        issues.push(ValidationIssue::NoDemands);
    }
    for (position, c) in instance.centers.iter().enumerate() {
        if c.id != position {
            issues.push(ValidationIssue::CenterIdGap {
                position,
                id: c.id,
            });
        }
        c.penalty.issues(position, n, &mut issues);
    }
    let cm = &instance.cost_matrix;
    if cm.rows() != n || cm.cols() != k {
        issues.push(ValidationIssue::DimensionMismatch {
            expected_rows: n,
            expected_cols: k,
            rows: cm.rows(),
            cols: cm.cols(),
        });
    } else {
        for d in 0..n {
            for s in 0..k {
                let value = cm.get(d, s);
                if value <= 0 {
                    issues.push(ValidationIssue::NonPositiveCost {
                        demand: d,
                        center: s,
                        value,
                    });
                }
            }
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

/// Penalty paid by the next allotment to a center currently holding
/// `current_load` units. Zero while below capacity.
pub fn marginal_penalty(center: &ServiceCenter, current_load: usize) -> Cost {
    if current_load < center.capacity {
        0
    } else {
        center.penalty.penalty(current_load - center.capacity + 1)
    }
}

/// Penalty saved by removing one unit from a center holding `current_load`
/// units: the most recently paid increment, or zero when not overloaded.
pub fn refund_penalty(center: &ServiceCenter, current_load: usize) -> Cost {
    if current_load <= center.capacity {
        0
    } else {
        center.penalty.penalty(current_load - center.capacity)
    }
}

/// Assignment of demands to centers plus per-center load counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allotment {
    assignment: Vec<Option<usize>>,
    load: Vec<usize>,
}

impl Allotment {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            assignment: vec![None; n],
            load: vec![0; k],
        }
    }

    /// Builds a complete allotment from a demand -> center vector.
    pub fn from_assignment(k: usize, assignment: &[usize]) -> Result<Self> {
        let mut a = Self::new(assignment.len(), k);
        for (d, &s) in assignment.iter().enumerate() {
            a.assign(d, s)?;
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.load.len()
    }

    #[inline]
    pub fn center_of(&self, demand: usize) -> Option<usize> {
        self.assignment[demand]
    }

    #[inline]
    pub fn load(&self, center: usize) -> usize {
        self.load[center]
    }

    pub fn loads(&self) -> &[usize] {
        &self.load
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn assigned_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// The assignment as plain center indices, if complete.
    pub fn to_vec(&self) -> Option<Vec<usize>> {
        self.assignment.iter().copied().collect()
    }

    fn check(&self, demand: usize, center: usize) -> Result<()> {
        if demand >= self.n() {
            return Err(Error::DemandOutOfRange {
                demand,
                n: self.n(),
            });
        }
        if center >= self.k() {
            return Err(Error::CenterOutOfRange {
                center,
                k: self.k(),
            });
        }
        Ok(())
    }

    pub fn assign(&mut self, demand: usize, center: usize) -> Result<()> {
        self.check(demand, center)?;
        if self.assignment[demand].is_some() {
            return Err(Error::AlreadyIndexed { demand });
        }
        self.assignment[demand] = Some(center);
        self.load[center] += 1;
        Ok(())
    }

    pub fn unassign(&mut self, demand: usize) -> Result<usize> {
        let center = self
            .assignment
            .get_mut(demand)
            .ok_or(Error::DemandOutOfRange {
                demand,
                n: self.load.len(),
            })?
            .take()
            .ok_or(Error::NotIndexed { demand })?;
        self.load[center] -= 1;
        Ok(center)
    }

    /// Moves `demand` from `from` to `to`; fails if it is not at `from`.
    pub fn move_demand(&mut self, demand: usize, from: usize, to: usize) -> Result<()> {
        self.check(demand, to)?;
        let actual = self.assignment[demand];
        if actual != Some(from) {
            return Err(Error::StaleTransfer {
                demand,
                from,
                actual,
            });
        }
        self.assignment[demand] = Some(to);
        self.load[from] -= 1;
        self.load[to] += 1;
        Ok(())
    }

    /// Recounts loads from the assignment vector.
    pub fn loads_consistent(&self) -> bool {
        let mut counted = vec![0usize; self.k()];
        for s in self.assignment.iter().flatten() {
            counted[*s] += 1;
        }
        counted == self.load
    }
}

/// Sum of assignment costs of assigned demands plus overload penalties at
/// the current loads. Does not require completeness.
pub fn partial_objective(instance: &ProblemInstance, allotment: &Allotment) -> Result<Cost> {
    let mut total: Cost = 0;
    for (d, s) in allotment.assignment.iter().enumerate() {
        if let Some(s) = s {
            total = total
                .checked_add(instance.cost(d, *s))
                .ok_or(Error::Overflow)?;
        }
    }
    for (center, &load) in instance.centers.iter().zip(&allotment.load) {
        let over = load.saturating_sub(center.capacity);
        let paid = center.penalty.total(over).ok_or(Error::Overflow)?;
        total = total.checked_add(paid).ok_or(Error::Overflow)?;
    }
    Ok(total)
}

/// Total assignment cost plus total overload penalty of a complete
/// allotment, recomputed from scratch.
pub fn evaluate_objective(instance: &ProblemInstance, allotment: &Allotment) -> Result<Cost> {
    if let Some(demand) = allotment.assignment.iter().position(Option::is_none) {
        return Err(Error::IncompleteAllotment { demand });
    }
    partial_objective(instance, allotment)
}
