use alloc::vec;
use alloc::vec::Vec;

use super::heap::{TransferHeap, NO_SLOT};
use super::TransferEdge;
use crate::engine::Engine;
use crate::model::{Allotment, Cost, CostMatrix};
use crate::{Error, Result};

/// All heaps whose transfers lead into one target center.
///
/// `heaps[i]` holds the demands currently at center `i`, keyed by the cost
/// of moving them to `target`. `heaps[target]` stays empty. Grouping by
/// target means a single transfer touches at most two heaps per column, and
/// columns can be updated independently of each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetColumn {
    target: usize,
    heaps: Vec<TransferHeap>,
    slots: Vec<u32>,
}

impl TargetColumn {
    fn new(target: usize, n: usize, k: usize) -> Self {
        Self {
            target,
            heaps: vec![TransferHeap::default(); k],
            slots: vec![NO_SLOT; n],
        }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn heap(&self, source: usize) -> &TransferHeap {
        &self.heaps[source]
    }

    fn insert(&mut self, cm: &CostMatrix, demand: usize, center: usize) -> u32 {
        if center == self.target {
            return 0;
        }
        let key = cm.get(demand, self.target) - cm.get(demand, center);
        self.heaps[center].push(&mut self.slots, key, demand);
        1
    }

    fn remove(&mut self, demand: usize, center: usize) -> u32 {
        if center == self.target {
            return 0;
        }
        let removed = self.heaps[center].remove(&mut self.slots, demand);
        debug_assert!(removed.is_some());
        1
    }

    /// Re-files `demand` from the `from` heap to the `to` heap of this
    /// column. Returns the number of heap mutations performed.
    pub fn move_demand(&mut self, cm: &CostMatrix, demand: usize, from: usize, to: usize) -> u32 {
        self.remove(demand, from) + self.insert(cm, demand, to)
    }
}

/// Per ordered pair `(i, j)`, `i != j`, an addressable min-heap of the
/// demands assigned to `i` keyed by their transfer cost to `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceIndex {
    k: usize,
    columns: Vec<TargetColumn>,
    home: Vec<Option<u32>>,
}

impl SubspaceIndex {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            k,
            columns: (0..k).map(|t| TargetColumn::new(t, n, k)).collect(),
            home: vec![None; n],
        }
    }

    /// Indexes every assigned demand of `allotment`.
    pub fn build(cm: &CostMatrix, allotment: &Allotment) -> Self {
        let mut index = Self::new(allotment.n(), allotment.k());
        for (d, s) in allotment.assignment().iter().enumerate() {
            if let Some(s) = s {
                index
                    .insert_demand(cm, d, *s)
                    .expect("fresh index has no entries");
            }
        }
        index
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.home.len()
    }

    pub fn center_of(&self, demand: usize) -> Option<usize> {
        self.home.get(demand).copied().flatten().map(|c| c as usize)
    }

    fn check_bounds(&self, demand: usize, center: usize) -> Result<()> {
        if demand >= self.n() {
            return Err(Error::DemandOutOfRange {
                demand,
                n: self.n(),
            });
        }
        if center >= self.k {
            return Err(Error::CenterOutOfRange { center, k: self.k });
        }
        Ok(())
    }

    /// Adds `demand` to the `k - 1` heaps `(center, *)`.
    pub fn insert_demand(&mut self, cm: &CostMatrix, demand: usize, center: usize) -> Result<()> {
        self.check_bounds(demand, center)?;
        if self.home[demand].is_some() {
            return Err(Error::AlreadyIndexed { demand });
        }
        self.home[demand] = Some(center as u32);
        for col in &mut self.columns {
            col.insert(cm, demand, center);
        }
        Ok(())
    }

    /// Removes `demand` from the heaps `(center, *)`.
    pub fn remove_demand(&mut self, demand: usize, center: usize) -> Result<()> {
        self.check_bounds(demand, center)?;
        match self.home[demand] {
            Some(c) if c as usize == center => {}
            _ => return Err(Error::NotIndexed { demand }),
        }
        self.home[demand] = None;
        for col in &mut self.columns {
            col.remove(demand, center);
        }
        Ok(())
    }

    /// Moves `demand` between heap families. The per-column work is handed
    /// to `engine`, which may run the columns concurrently.
    pub fn transfer<E: Engine + ?Sized>(
        &mut self,
        cm: &CostMatrix,
        demand: usize,
        from: usize,
        to: usize,
        engine: &E,
    ) -> Result<()> {
        self.check_bounds(demand, to)?;
        if from == to {
            return Err(Error::SameCenter { center: from });
        }
        let actual = self.center_of(demand);
        if actual != Some(from) {
            return Err(Error::StaleTransfer {
                demand,
                from,
                actual,
            });
        }
        self.home[demand] = Some(to as u32);
        engine.for_each_column(&mut self.columns, &|col: &mut TargetColumn| {
            col.move_demand(cm, demand, from, to);
        });
        Ok(())
    }

    #[inline]
    pub(crate) fn peek(&self, from: usize, to: usize) -> Option<(Cost, usize)> {
        self.columns[to].heaps[from].peek()
    }

    /// The cheapest transfer from `from` to `to`, smallest demand index on
    /// ties.
    pub fn min_transfer(&self, from: usize, to: usize) -> Result<Option<TransferEdge>> {
        if from >= self.k {
            return Err(Error::CenterOutOfRange { center: from, k: self.k });
        }
        if to >= self.k {
            return Err(Error::CenterOutOfRange { center: to, k: self.k });
        }
        if from == to {
            return Err(Error::SameCenter { center: from });
        }
        Ok(self.peek(from, to).map(|(cost, demand)| TransferEdge {
            from,
            to,
            demand,
            cost,
        }))
    }

    pub fn heap(&self, from: usize, to: usize) -> &TransferHeap {
        &self.columns[to].heaps[from]
    }

    pub fn columns(&self) -> &[TargetColumn] {
        &self.columns
    }

    /// Heap contents `(cost, demand)` in sorted order.
    pub fn sorted_contents(&self, from: usize, to: usize) -> Vec<(Cost, usize)> {
        let mut v: Vec<_> = self.heap(from, to).entries().collect();
        v.sort_unstable();
        v
    }

    /// True when every heap holds exactly what a from-scratch rebuild for
    /// `allotment` would hold.
    pub fn matches_rebuild(&self, cm: &CostMatrix, allotment: &Allotment) -> bool {
        let fresh = Self::build(cm, allotment);
        (0..self.k).all(|i| {
            (0..self.k).filter(|&j| j != i).all(|j| {
                self.sorted_contents(i, j) == fresh.sorted_contents(i, j)
                    && self.peek(i, j) == fresh.peek(i, j)
            })
        })
    }
}
