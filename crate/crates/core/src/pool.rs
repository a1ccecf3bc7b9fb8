use crate::neighbor::{order_key, Neighbor};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoolEntry {
    pub id: u32,
    pub distance: f32,
    pub expanded: bool,
}

/// Bounded candidate set of a beam search, sorted by `(distance, id)`.
#[derive(Clone, Debug, Default)]
pub struct CandidatePool {
    capacity: usize,
    entries: Vec<PoolEntry>,
}

impl CandidatePool {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: Vec::with_capacity(capacity + 1),
        }
    }

    pub fn reset(&mut self, capacity: usize) {
        self.capacity = capacity;
        self.entries.clear();
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn worst(&self) -> Option<&PoolEntry> {
        self.entries.last()
    }

    /// Inserts `c` unless its id is already present or the pool is full of
    /// closer entries. Returns whether it was retained.
    pub fn insert(&mut self, c: Neighbor) -> bool {
        self.insert_at(c.id, c.distance).is_some()
    }

    /// Like [`insert`](Self::insert) but reports the slot the entry landed in.
    pub fn insert_at(&mut self, id: u32, distance: f32) -> Option<usize> {
        if self.entries.iter().any(|e| e.id == id) {
            return None;
        }
        self.insert_unique(id, distance)
    }

    /// Same as `insert_at` for callers that already guarantee `id` is absent.
    pub(crate) fn insert_unique(&mut self, id: u32, distance: f32) -> Option<usize> {
        if self.capacity == 0 {
            return None;
        }
        if let Some(last) = self.entries.last() {
            if self.is_full() && order_key(distance, id, last.distance, last.id).is_ge() {
                return None;
            }
        }
        let pos = self
            .entries
            .partition_point(|e| order_key(e.distance, e.id, distance, id).is_lt());
        self.entries.insert(
            pos,
            PoolEntry {
                id,
                distance,
                expanded: false,
            },
        );
        if self.entries.len() > self.capacity {
            self.entries.pop();
        }
        Some(pos)
    }

    /// Index of the closest unexpanded entry at or after `from`.
    pub fn first_unexpanded(&self, from: usize) -> Option<usize> {
        (from..self.entries.len()).find(|&i| !self.entries[i].expanded)
    }

    pub fn mark_expanded(&mut self, i: usize) -> u32 {
        self.entries[i].expanded = true;
        self.entries[i].id
    }

    pub fn to_neighbors(&self, k: usize) -> Vec<Neighbor> {
        self.entries
            .iter()
            .take(k)
            .map(|e| Neighbor::new(e.id, e.distance))
            .collect()
    }
}
