//! Fixed-capacity k-NN graph used as the intermediate merge representation.

use crate::graph::GraphView;
use crate::neighbor::{order_key, Flag, Neighbor};

/// One vertex's neighbors, sorted ascending by `(distance, id)` with no
/// repeated ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NeighborList {
    entries: Vec<Neighbor>,
}

impl NeighborList {
    /// Wraps an already sorted, deduplicated list.
    pub fn from_sorted(entries: Vec<Neighbor>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].order(&w[1]).is_lt()));
        Self { entries }
    }

    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.entries.iter().any(|n| n.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|n| n.id)
    }

    /// Distance of the farthest entry, or infinity while below `capacity`.
    pub fn admission_bound(&self, capacity: usize) -> f32 {
        if self.entries.len() < capacity {
            f32::INFINITY
        } else {
            self.entries.last().map_or(f32::INFINITY, |n| n.distance)
        }
    }

    /// Inserts `id` flagged New when it is absent and beats the current
    /// farthest entry (or the list has room). Returns whether the list changed.
    pub fn try_insert(&mut self, id: u32, distance: f32, capacity: usize) -> bool {
        if capacity == 0 {
            return false;
        }
        if self.entries.len() >= capacity {
            let last = self.entries[self.entries.len() - 1];
            if order_key(distance, id, last.distance, last.id).is_ge() {
                return false;
            }
        }
        if self.contains(id) {
            return false;
        }
        let pos = self
            .entries
            .partition_point(|e| order_key(e.distance, e.id, distance, id).is_lt());
        self.entries
            .insert(pos, Neighbor::with_flag(id, distance, Flag::New));
        if self.entries.len() > capacity {
            self.entries.pop();
        }
        true
    }

    /// Splits ids by flag and demotes every New entry to Old.
    pub fn visit(&mut self, new: &mut Vec<u32>, old: &mut Vec<u32>) {
        for e in &mut self.entries {
            match e.flag {
                Flag::New => {
                    new.push(e.id);
                    e.flag = Flag::Old;
                }
                Flag::Old => old.push(e.id),
            }
        }
    }

    /// Replaces the entry for `old_id` with `(new_id, distance)` and restores
    /// sort order. Returns false if `old_id` is absent or `new_id` present.
    pub fn replace(&mut self, old_id: u32, new_id: u32, distance: f32) -> bool {
        if self.contains(new_id) {
            return false;
        }
        let Some(pos) = self.entries.iter().position(|n| n.id == old_id) else {
            return false;
        };
        self.entries.remove(pos);
        let at = self
            .entries
            .partition_point(|e| order_key(e.distance, e.id, distance, new_id).is_lt());
        self.entries
            .insert(at, Neighbor::with_flag(new_id, distance, Flag::New));
        true
    }

    pub fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }

}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnGraph {
    k: usize,
    lists: Vec<NeighborList>,
}

impl KnnGraph {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            k,
            lists: vec![NeighborList::default(); n],
        }
    }

    pub fn from_lists(k: usize, lists: Vec<NeighborList>) -> Self {
        Self { k, lists }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, u: u32) -> &NeighborList {
        &self.lists[u as usize]
    }

    pub fn list_mut(&mut self, u: u32) -> &mut NeighborList {
        &mut self.lists[u as usize]
    }

    pub fn lists(&self) -> &[NeighborList] {
        &self.lists
    }

    pub(crate) fn into_lists(self) -> Vec<NeighborList> {
        self.lists
    }

    pub fn num_edges(&self) -> usize {
        self.lists.iter().map(NeighborList::len).sum()
    }

    /// Exact indegree of every vertex.
    pub fn indegrees(&self) -> Vec<u32> {
        let mut t = vec![0u32; self.lists.len()];
        for l in &self.lists {
            for id in l.ids() {
                t[id as usize] += 1;
            }
        }
        t
    }

    /// Checks capacity, ordering, uniqueness, self-loops and id range.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.lists.len();
        for (v, l) in self.lists.iter().enumerate() {
            if l.len() > self.k {
                return Err(format!("vertex {v}: {} entries above capacity {}", l.len(), self.k));
            }
            for w in l.entries.windows(2) {
                if !w[0].order(&w[1]).is_lt() {
                    return Err(format!("vertex {v}: list not strictly sorted"));
                }
            }
            let mut ids: Vec<u32> = l.ids().collect();
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(format!("vertex {v}: repeated id"));
            }
            if let Some(&bad) = ids.iter().find(|&&id| id as usize == v || id as usize >= n) {
                return Err(format!("vertex {v}: bad neighbor {bad}"));
            }
        }
        Ok(())
    }

    /// Plain adjacency (ids only), in list order.
    pub fn to_adjacency(&self) -> Vec<Vec<u32>> {
        self.lists.iter().map(|l| l.ids().collect()).collect()
    }
}

impl GraphView for KnnGraph {
    fn num_vertices(&self) -> usize {
        self.lists.len()
    }

    fn neighbors_into(&self, u: u32, out: &mut Vec<u32>) {
        out.clear();
        out.extend(self.lists[u as usize].ids());
    }
}
