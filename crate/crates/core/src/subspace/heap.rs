use alloc::vec::Vec;

use crate::model::Cost;

/// Slot value for a demand that is not stored in any heap of a column.
pub(crate) const NO_SLOT: u32 = u32::MAX;

/// Binary min-heap of `(transfer cost, demand)` pairs, ordered by cost and
/// then by demand index.
///
/// Positions are tracked in an external slot array indexed by demand. A
/// demand sits in at most one heap of a given target column (the heap of the
/// center it is assigned to), so all heaps of a column share one slot array.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransferHeap {
    entries: Vec<(Cost, u32)>,
}

impl TransferHeap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn peek(&self) -> Option<(Cost, usize)> {
        self.entries.first().map(|&(c, d)| (c, d as usize))
    }

    pub fn entries(&self) -> impl Iterator<Item = (Cost, usize)> + '_ {
        self.entries.iter().map(|&(c, d)| (c, d as usize))
    }

    pub(crate) fn push(&mut self, slots: &mut [u32], key: Cost, demand: usize) {
        debug_assert_eq!(slots[demand], NO_SLOT);
        let entry = (key, demand as u32);
        self.entries.push(entry);
        let pos = self.sift_up(slots, self.entries.len() - 1, entry);
        self.place(slots, pos, entry);
    }

    /// Removes `demand` and returns its key, or `None` if it is not stored
    /// here.
    pub(crate) fn remove(&mut self, slots: &mut [u32], demand: usize) -> Option<Cost> {
        let pos = slots[demand];
        if pos == NO_SLOT {
            return None;
        }
        let pos = pos as usize;
        if self.entries.get(pos).map(|e| e.1 as usize) != Some(demand) {
            return None;
        }
        slots[demand] = NO_SLOT;
        let last = self.entries.pop().expect("non-empty heap");
        if pos == self.entries.len() {
            return Some(last.0);
        }
        let key = self.entries[pos].0;
        let hole = if pos > 0 && last < self.entries[(pos - 1) / 2] {
            self.sift_up(slots, pos, last)
        } else {
            self.sift_down(slots, pos, last)
        };
        self.place(slots, hole, last);
        Some(key)
    }

    #[inline]
    fn place(&mut self, slots: &mut [u32], pos: usize, entry: (Cost, u32)) {
        self.entries[pos] = entry;
        slots[entry.1 as usize] = pos as u32;
    }

    /// Moves parents down into the hole at `pos` while they exceed `entry`.
    /// Returns the final hole.
    fn sift_up(&mut self, slots: &mut [u32], mut pos: usize, entry: (Cost, u32)) -> usize {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            let above = self.entries[parent];
            if entry >= above {
                break;
            }
            self.place(slots, pos, above);
            pos = parent;
        }
        pos
    }

    /// Moves smaller children up into the hole at `pos` while they are below
    /// `entry`. Returns the final hole.
    fn sift_down(&mut self, slots: &mut [u32], mut pos: usize, entry: (Cost, u32)) -> usize {
        let len = self.entries.len();
        loop {
            let left = 2 * pos + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.entries[right] < self.entries[left] {
                right
            } else {
                left
            };
            let below = self.entries[child];
            if below >= entry {
                break;
            }
            self.place(slots, pos, below);
            pos = child;
        }
        pos
    }
}
