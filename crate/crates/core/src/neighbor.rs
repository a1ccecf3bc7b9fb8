use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flag {
    New,
    Old,
}

/// A vertex id paired with its distance to some owner vertex or query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub id: u32,
    pub distance: f32,
    pub flag: Flag,
}

impl Neighbor {
    pub fn new(id: u32, distance: f32) -> Self {
        Self {
            id,
            distance,
            flag: Flag::New,
        }
    }

    pub fn with_flag(id: u32, distance: f32, flag: Flag) -> Self {
        Self { id, distance, flag }
    }

    /// Total order by `(distance, id)`; distance ties go to the lower id.
    #[inline]
    pub fn order(&self, other: &Self) -> Ordering {
        order_key(self.distance, self.id, other.distance, other.id)
    }
}

#[inline]
pub(crate) fn order_key(da: f32, ia: u32, db: f32, ib: u32) -> Ordering {
    da.total_cmp(&db).then(ia.cmp(&ib))
}

/// Sorts ascending by `(distance, id)` and drops repeated ids, keeping the
/// first (closest) occurrence.
pub fn sort_dedup(list: &mut Vec<Neighbor>) {
    list.sort_unstable_by(Neighbor::order);
    let mut seen = std::collections::HashSet::with_capacity(list.len());
    list.retain(|n| seen.insert(n.id));
}
