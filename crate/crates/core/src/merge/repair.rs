//! Indegree repair: gives vertices nobody points to an incoming edge by
//! swapping out a redundant edge of one of their neighbors.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dataset::PointSet;
use crate::knng::KnnGraph;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RepairReport {
    pub zero_indegree_before: usize,
    pub zero_indegree_after: usize,
    pub swaps: usize,
    pub ndc: u64,
    /// Exact indegree of every vertex after the repair.
    #[serde(skip)]
    pub indegrees: Vec<u32>,
}

/// For each vertex `o` with indegree 0 (ascending id), walks its neighbors
/// `v` closest first. In `v`'s list it looks, farthest first, for an entry
/// `v'` with indegree above 1 that was not itself put there by this repair,
/// and replaces `v'` with `o`. At most one swap per orphan.
///
/// Outdegrees and the edge count are preserved and no vertex's indegree
/// drops below 1 through a swap.
pub fn indegree_repair<P: PointSet>(knng: &mut KnnGraph, points: &P) -> RepairReport {
    let mut t = knng.indegrees();
    let orphans: Vec<u32> = (0..t.len() as u32).filter(|&v| t[v as usize] == 0).collect();
    let mut replaced: HashSet<(u32, u32)> = HashSet::new();
    let mut swaps = 0;
    let mut ndc = 0;
    for &o in &orphans {
        let own: Vec<u32> = knng.list(o).ids().collect();
        'walk: for v in own {
            let victim = knng
                .list(v)
                .entries()
                .iter()
                .rev()
                .map(|e| e.id)
                .find(|&w| t[w as usize] > 1 && !replaced.contains(&(v, w)));
            if let Some(w) = victim {
                let d = points.distance_between(v, o);
                ndc += 1;
                if knng.list_mut(v).replace(w, o, d) {
                    replaced.insert((v, o));
                    t[w as usize] -= 1;
                    t[o as usize] += 1;
                    swaps += 1;
                    break 'walk;
                }
            }
        }
    }
    let after = t.iter().filter(|&&x| x == 0).count();
    RepairReport {
        zero_indegree_before: orphans.len(),
        zero_indegree_after: after,
        swaps,
        ndc,
        indegrees: t,
    }
}
