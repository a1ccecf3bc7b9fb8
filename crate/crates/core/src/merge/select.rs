//! Third merge stage: selecting a bounded-degree proximity graph from the
//! refined k-NN graph.

use crate::build::medoid::estimate_medoid;
use crate::dataset::PointSet;
use crate::error::{Error, Result};
use crate::graph::ProximityGraph;
use crate::knng::KnnGraph;
use crate::metric::Metric;
use crate::neighbor::Neighbor;
use crate::parallel::map_indexed;

/// Result of [`knng_to_pg`].
#[derive(Clone, Debug)]
pub struct Selection {
    pub graph: ProximityGraph,
    pub ndc: u64,
}

/// Neighbor selection followed by connectivity enhancement.
///
/// Selection scans each list closest first and keeps `v` when its
/// indegree `t[v]` is exactly 1 or when `v` is closer to the owner than to
/// every neighbor kept so far, up to `k` neighbors. Enhancement then adds
/// the reverse of every selected edge, re-sorts each list by distance and
/// truncates it to `k`. The enterpoint is the estimated medoid.
pub fn knng_to_pg<P: PointSet + Sync>(
    knng: &KnnGraph,
    t: &[u32],
    k: usize,
    points: &P,
    metric: Metric,
    seed: u64,
    threads: usize,
) -> Result<Selection> {
    let n = knng.len();
    if t.len() != n || points.len() != n {
        return Err(Error::param("indegree table and points must cover the graph"));
    }
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let rows = map_indexed(threads, n, || (), |_, u| {
        let mut kept: Vec<Neighbor> = Vec::with_capacity(k);
        let mut ndc = 0u64;
        for c in knng.list(u as u32).entries() {
            if kept.len() == k {
                break;
            }
            let keep = t[c.id as usize] == 1
                || kept.iter().all(|w| {
                    ndc += 1;
                    c.distance < points.distance_between(w.id, c.id)
                });
            if keep {
                kept.push(Neighbor::new(c.id, c.distance));
            }
        }
        (kept, ndc)
    })?;

    let mut ndc = 0;
    let mut lists: Vec<Vec<Neighbor>> = Vec::with_capacity(n);
    for (kept, d) in rows {
        ndc += d;
        lists.push(kept);
    }
    let mut reverse: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
    for (u, l) in lists.iter().enumerate() {
        for e in l {
            reverse[e.id as usize].push(Neighbor::new(u as u32, e.distance));
        }
    }
    let adjacency: Vec<Vec<u32>> = lists
        .into_iter()
        .zip(reverse)
        .map(|(mut l, r)| {
            l.extend(r);
            crate::neighbor::sort_dedup(&mut l);
            l.truncate(k);
            l.into_iter().map(|e| e.id).collect()
        })
        .collect();
    let enterpoint = estimate_medoid(points, seed);
    let graph = ProximityGraph::flat(metric, points.dim(), k, adjacency, enterpoint)?;
    Ok(Selection { graph, ndc })
}
