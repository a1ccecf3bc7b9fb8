//! Query-time routines: beam search over any [`GraphView`], greedy layer
//! descent for hierarchical graphs, and exact brute-force k-NN.

use std::collections::{BinaryHeap, HashMap};

use crate::dataset::PointSet;
use crate::error::{Error, Result};
use crate::graph::{GraphView, ProximityGraph};
use crate::neighbor::{order_key, Neighbor};
use crate::pool::CandidatePool;

/// Per-query visited marks; bumping the epoch clears them in O(1).
#[derive(Clone, Debug, Default)]
pub struct VisitedSet {
    stamps: Vec<u32>,
    epoch: u32,
}

impl VisitedSet {
    pub fn new(n: usize) -> Self {
        Self {
            stamps: vec![0; n],
            epoch: 0,
        }
    }

    pub fn reset(&mut self, n: usize) {
        if self.stamps.len() < n {
            self.stamps.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.fill(0);
            self.epoch = 1;
        }
    }

    /// Marks `id`; returns true if it was not yet marked in this epoch.
    #[inline]
    pub fn insert(&mut self, id: u32) -> bool {
        let s = &mut self.stamps[id as usize];
        if *s == self.epoch {
            false
        } else {
            *s = self.epoch;
            true
        }
    }

    #[inline]
    pub fn contains(&self, id: u32) -> bool {
        self.stamps[id as usize] == self.epoch
    }
}

/// Diagnostics recorded by [`Searcher::search_traced`].
#[derive(Clone, Debug, Default)]
pub struct SearchTrace {
    /// Vertex -> the expanded vertex through which it was first reached.
    pub parents: HashMap<u32, u32>,
    /// Distance of the pool's worst entry after each expansion, recorded
    /// once the pool is full.
    pub worst_per_iteration: Vec<f32>,
}

/// Reusable scratch space for beam searches. One per thread.
#[derive(Clone, Debug, Default)]
pub struct Searcher {
    visited: VisitedSet,
    pool: CandidatePool,
    expanded: Vec<Neighbor>,
    buf: Vec<u32>,
}

impl Searcher {
    pub fn new() -> Self {
        Self::default()
    }

    /// Beam search from `ep` with a pool of `pool_size`, returning the `k`
    /// closest pool entries. `ndc` grows by one per distance evaluation.
    #[allow(clippy::too_many_arguments)]
    pub fn search<P: PointSet, G: GraphView>(
        &mut self,
        points: &P,
        graph: &G,
        query: &[f32],
        ep: u32,
        pool_size: usize,
        k: usize,
        ndc: &mut u64,
    ) -> Result<Vec<Neighbor>> {
        self.run(points, graph, query, ep, pool_size, k, ndc, None)?;
        Ok(self.pool.to_neighbors(k))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn search_traced<P: PointSet, G: GraphView>(
        &mut self,
        points: &P,
        graph: &G,
        query: &[f32],
        ep: u32,
        pool_size: usize,
        k: usize,
        ndc: &mut u64,
    ) -> Result<(Vec<Neighbor>, SearchTrace)> {
        let mut trace = SearchTrace::default();
        self.run(points, graph, query, ep, pool_size, k, ndc, Some(&mut trace))?;
        Ok((self.pool.to_neighbors(k), trace))
    }

    /// Vertices expanded by the last search, in expansion order.
    pub fn expanded(&self) -> &[Neighbor] {
        &self.expanded
    }

    /// Final pool of the last search.
    pub fn pool(&self) -> &CandidatePool {
        &self.pool
    }

    #[allow(clippy::too_many_arguments)]
    fn run<P: PointSet, G: GraphView>(
        &mut self,
        points: &P,
        graph: &G,
        query: &[f32],
        ep: u32,
        pool_size: usize,
        k: usize,
        ndc: &mut u64,
        mut trace: Option<&mut SearchTrace>,
    ) -> Result<()> {
        if pool_size == 0 {
            return Err(Error::param("pool size must be positive"));
        }
        if k > pool_size {
            return Err(Error::param(format!("k = {k} exceeds pool size {pool_size}")));
        }
        let n = graph.num_vertices();
        if ep as usize >= n || ep as usize >= points.len() {
            return Err(Error::Id { id: ep as u64, n });
        }
        if query.len() != points.dim() {
            return Err(Error::Dimension {
                expected: points.dim(),
                got: query.len(),
            });
        }

        self.visited.reset(n);
        self.pool.reset(pool_size);
        self.expanded.clear();

        self.visited.insert(ep);
        let d = points.distance_to(query, ep);
        *ndc += 1;
        self.pool.insert_unique(ep, d);

        let mut cursor = 0;
        while let Some(i) = self.pool.first_unexpanded(cursor) {
            let u = self.pool.mark_expanded(i);
            self.expanded
                .push(Neighbor::new(u, self.pool.entries()[i].distance));
            graph.neighbors_into(u, &mut self.buf);
            let mut lowest = usize::MAX;
            for &v in &self.buf {
                if !self.visited.insert(v) {
                    continue;
                }
                let d = points.distance_to(query, v);
                *ndc += 1;
                if let Some(t) = trace.as_deref_mut() {
                    t.parents.insert(v, u);
                }
                if let Some(pos) = self.pool.insert_unique(v, d) {
                    lowest = lowest.min(pos);
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                if self.pool.is_full() {
                    t.worst_per_iteration
                        .push(self.pool.worst().map_or(f32::INFINITY, |e| e.distance));
                }
            }
            cursor = if lowest <= i { lowest } else { i + 1 };
        }
        Ok(())
    }
}

/// One-shot beam search with fresh scratch space.
pub fn knn_search<P: PointSet, G: GraphView>(
    points: &P,
    graph: &G,
    query: &[f32],
    ep: u32,
    pool_size: usize,
    k: usize,
    ndc: &mut u64,
) -> Result<Vec<Neighbor>> {
    Searcher::new().search(points, graph, query, ep, pool_size, k, ndc)
}

/// Greedy routing on one layer: repeatedly move to the closest neighbor that
/// is strictly closer (by `(distance, id)`) than the current vertex.
pub fn greedy_on_layer<P: PointSet, G: GraphView>(
    points: &P,
    layer: &G,
    query: &[f32],
    start: u32,
    ndc: &mut u64,
    buf: &mut Vec<u32>,
) -> u32 {
    let mut cur = start;
    let mut cur_d = points.distance_to(query, cur);
    *ndc += 1;
    loop {
        let mut best = cur;
        let mut best_d = cur_d;
        layer.neighbors_into(cur, buf);
        for &v in buf.iter() {
            let d = points.distance_to(query, v);
            *ndc += 1;
            if order_key(d, v, best_d, best).is_lt() {
                best = v;
                best_d = d;
            }
        }
        if best == cur {
            return cur;
        }
        cur = best;
        cur_d = best_d;
    }
}

/// Greedy descent through the layers `from_level ..= to_level` (top-down),
/// starting at the graph's enterpoint. Returns the final local minimum.
pub fn greedy_descend<P: PointSet>(
    points: &P,
    graph: &ProximityGraph,
    query: &[f32],
    from_level: usize,
    to_level: usize,
    ndc: &mut u64,
) -> Result<u32> {
    let ep = graph
        .enterpoint()
        .ok_or(Error::Id { id: 0, n: 0 })?;
    if from_level < to_level {
        return Err(Error::param("from_level must be at least to_level"));
    }
    if from_level > graph.max_level() {
        return Err(Error::param(format!(
            "level {from_level} above the top layer {}",
            graph.max_level()
        )));
    }
    let mut buf = Vec::new();
    let mut cur = ep;
    for level in (to_level..=from_level).rev() {
        cur = greedy_on_layer(points, &graph.layer(level), query, cur, ndc, &mut buf);
    }
    Ok(cur)
}

/// Standard query entry: greedy descent through the upper layers (if any),
/// then a beam search on the base layer.
#[allow(clippy::too_many_arguments)]
pub fn search_index<P: PointSet>(
    searcher: &mut Searcher,
    points: &P,
    graph: &ProximityGraph,
    query: &[f32],
    pool_size: usize,
    k: usize,
    ndc: &mut u64,
) -> Result<Vec<Neighbor>> {
    let Some(mut ep) = graph.enterpoint() else {
        return Ok(Vec::new());
    };
    let top = graph.max_level();
    if top > 0 {
        ep = greedy_descend(points, graph, query, top, 1, ndc)?;
    }
    searcher.search(points, graph, query, ep, pool_size, k, ndc)
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f32, u32);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        order_key(self.0, self.1, other.0, other.1)
    }
}

/// Exact top-`k` under `(distance, id)` order, via a bounded max-heap.
pub fn brute_force_knn<P: PointSet>(points: &P, query: &[f32], k: usize) -> Result<Vec<Neighbor>> {
    let n = points.len();
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds dataset size {n}")));
    }
    if n > 0 && query.len() != points.dim() {
        return Err(Error::Dimension {
            expected: points.dim(),
            got: query.len(),
        });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut heap = BinaryHeap::with_capacity(k + 1);
    for id in 0..n as u32 {
        let d = points.distance_to(query, id);
        if heap.len() < k {
            heap.push(HeapItem(d, id));
        } else if let Some(top) = heap.peek() {
            if order_key(d, id, top.0, top.1).is_lt() {
                heap.pop();
                heap.push(HeapItem(d, id));
            }
        }
    }
    Ok(heap
        .into_sorted_vec()
        .into_iter()
        .map(|HeapItem(d, id)| Neighbor::new(id, d))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::metric::Metric;

    fn line(xs: &[f32]) -> Dataset {
        let rows: Vec<[f32; 2]> = xs.iter().map(|&x| [x, 0.0]).collect();
        Dataset::from_rows(&rows, Metric::Euclidean).unwrap()
    }

    #[test]
    fn single_vertex_graph() {
        let ds = line(&[3.0]);
        let g: Vec<Vec<u32>> = vec![vec![]];
        let mut ndc = 0;
        let r = knn_search(&ds, &g, &[0.0, 0.0], 0, 1, 1, &mut ndc).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].id, r[0].distance), (0, 3.0));
        assert_eq!(ndc, 1);
    }

    #[test]
    fn parameter_errors() {
        let ds = line(&[0.0, 1.0]);
        let g: Vec<Vec<u32>> = vec![vec![1], vec![0]];
        let mut ndc = 0;
        assert!(matches!(
            knn_search(&ds, &g, &[0.0, 0.0], 0, 1, 2, &mut ndc),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            knn_search(&ds, &g, &[0.0, 0.0], 5, 2, 1, &mut ndc),
            Err(Error::Id { .. })
        ));
    }

    #[test]
    fn brute_force_hand_example() {
        let ds = line(&[0.0, 1.0, 5.0]);
        let r = brute_force_knn(&ds, &[0.9, 0.0], 2).unwrap();
        assert_eq!(r.iter().map(|n| n.id).collect::<Vec<_>>(), vec![1, 0]);
        let all = brute_force_knn(&ds, &[0.9, 0.0], 3).unwrap();
        assert_eq!(all.iter().map(|n| n.id).collect::<Vec<_>>(), vec![1, 0, 2]);
        assert!(brute_force_knn(&ds, &[0.9, 0.0], 4).is_err());
    }

    #[test]
    fn greedy_reaches_line_minimum() {
        let ds = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let g: Vec<Vec<u32>> = (0..5u32)
            .map(|i| {
                let mut v = vec![];
                if i > 0 {
                    v.push(i - 1);
                }
                if i < 4 {
                    v.push(i + 1);
                }
                v
            })
            .collect();
        let mut ndc = 0;
        let mut buf = vec![];
        assert_eq!(greedy_on_layer(&ds, &g, &[3.2, 0.0], 0, &mut ndc, &mut buf), 3);
    }
}
