//! Where the neighbors of a full index come from relative to the indexes
//! built on its parts.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ProximityGraph;
use crate::idmap::IdMap;

/// Fractions of the full index's edges that are shared with the source
/// index (`pi_uc`), new but within the same source (`pi_nl`), or new and
/// pointing into another source (`pi_nc`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub pi_uc: f64,
    pub pi_nl: f64,
    pub pi_nc: f64,
    pub edges: u64,
}

/// Classifies every base-layer edge of `full` (global ids under `id_map`)
/// against the base-layer edges of the source index its tail came from.
/// A graph without edges counts as fully shared.
pub fn neighbor_composition(
    sub_indexes: &[&ProximityGraph],
    full: &ProximityGraph,
    id_map: &IdMap,
) -> Result<CompositionReport> {
    if sub_indexes.len() != id_map.num_sources() {
        return Err(Error::param("one sub-index per id map source is required"));
    }
    if full.num_vertices() != id_map.total_valid() {
        return Err(Error::Id {
            id: id_map.total_valid() as u64,
            n: full.num_vertices(),
        });
    }
    let (mut uc, mut nl, mut nc) = (0u64, 0u64, 0u64);
    let mut shared = HashSet::new();
    for g in 0..full.num_vertices() as u32 {
        let (s, local) = id_map.inverse(g);
        let sub = sub_indexes[s];
        if local as usize >= sub.num_vertices() {
            return Err(Error::Id { id: local as u64, n: sub.num_vertices() });
        }
        shared.clear();
        shared.extend(sub.neighbors(local).iter().filter_map(|&w| id_map.map(s, w)));
        for &w in full.neighbors(g) {
            if shared.contains(&w) {
                uc += 1;
            } else if id_map.inverse(w).0 == s {
                nl += 1;
            } else {
                nc += 1;
            }
        }
    }
    let edges = uc + nl + nc;
    if edges == 0 {
        return Ok(CompositionReport { pi_uc: 1.0, pi_nl: 0.0, pi_nc: 0.0, edges });
    }
    let e = edges as f64;
    Ok(CompositionReport {
        pi_uc: uc as f64 / e,
        pi_nl: nl as f64 / e,
        pi_nc: nc as f64 / e,
        edges,
    })
}
