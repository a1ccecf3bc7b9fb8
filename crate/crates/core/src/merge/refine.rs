//! Second merge stage: in-place refinement of the k-NN graph.
//!
//! Each sweep walks the graph depth first. Visiting a vertex gathers its
//! New and Old candidates (own list plus recorded reverse neighbors) and
//! demotes its New entries; every New/New and New/Old candidate pair from
//! different source indexes is then offered to both endpoints' lists.

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU64, Ordering};

use parking_lot::Mutex;

use crate::dataset::PointSet;
use crate::error::Result;
use crate::knng::{KnnGraph, NeighborList};
use crate::parallel::with_threads;

use super::repair::{indegree_repair, RepairReport};

/// Gathers the candidates of `v` and demotes its New neighbors.
///
/// Returns `(C_n, C_o)`: `v`'s New neighbors plus `reverse_new[v]`, and its
/// Old neighbors plus `reverse_old[v]`, each deduplicated, with `C_o`
/// disjoint from `C_n`. The reverse entries of `v` are consumed, and `v`
/// is recorded in `reverse_new[w]` or `reverse_old[w]` for every neighbor
/// `w` according to the flag `w` had before the visit.
pub fn refine_visit(
    v: u32,
    knng: &mut KnnGraph,
    reverse_new: &mut [Vec<u32>],
    reverse_old: &mut [Vec<u32>],
) -> (Vec<u32>, Vec<u32>) {
    let mut new = Vec::new();
    let mut old = Vec::new();
    knng.list_mut(v).visit(&mut new, &mut old);
    for &w in &new {
        reverse_new[w as usize].push(v);
    }
    for &w in &old {
        reverse_old[w as usize].push(v);
    }
    new.append(&mut std::mem::take(&mut reverse_new[v as usize]));
    old.append(&mut std::mem::take(&mut reverse_old[v as usize]));
    finish_candidates(&mut new, &mut old);
    (new, old)
}

fn finish_candidates(new: &mut Vec<u32>, old: &mut Vec<u32>) {
    new.sort_unstable();
    new.dedup();
    old.sort_unstable();
    old.dedup();
    old.retain(|w| new.binary_search(w).is_err());
}

/// Offers `v1` and `v2` to each other's lists, computing their distance
/// once. Returns true iff either list changed.
pub fn refine_update<P: PointSet>(points: &P, v1: u32, v2: u32, knng: &mut KnnGraph, ndc: &mut u64) -> bool {
    let d = points.distance_between(v1, v2);
    *ndc += 1;
    let k = knng.k();
    let a = knng.list_mut(v1).try_insert(v2, d, k);
    let b = knng.list_mut(v2).try_insert(v1, d, k);
    a || b
}

/// Counters for one sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// Successful list insertions.
    pub insertions: u64,
    pub ndc: u64,
}

/// Refinement state that persists across sweeps: the lists, the reverse
/// neighbor tables and the source index of every vertex.
///
/// Lists sit behind per-vertex locks so that sweeps can run on several
/// threads; the farthest admitted distance of each list is mirrored in an
/// atomic so most rejected offers never take a lock.
pub struct Refiner<'a, P> {
    points: &'a P,
    origins: &'a [u32],
    k: usize,
    lists: Vec<Mutex<NeighborList>>,
    bound: Vec<AtomicU32>,
    reverse_new: Vec<Mutex<Vec<u32>>>,
    reverse_old: Vec<Mutex<Vec<u32>>>,
    threads: usize,
}

struct Scratch {
    new: Vec<u32>,
    old: Vec<u32>,
    stack: Vec<u32>,
    ndc: u64,
    insertions: u64,
}

impl Scratch {
    fn new() -> Self {
        Self {
            new: Vec::new(),
            old: Vec::new(),
            stack: Vec::new(),
            ndc: 0,
            insertions: 0,
        }
    }
}

impl<'a, P: PointSet + Sync> Refiner<'a, P> {
    /// `origins[v]` is the source index vertex `v` came from; only pairs
    /// with different origins are compared.
    pub fn new(knng: KnnGraph, points: &'a P, origins: &'a [u32], threads: usize) -> Self {
        assert_eq!(knng.len(), origins.len(), "one origin per vertex");
        assert_eq!(knng.len(), points.len(), "one vector per vertex");
        let k = knng.k();
        let n = knng.len();
        let lists: Vec<Mutex<NeighborList>> = knng.into_lists().into_iter().map(Mutex::new).collect();
        let bound = lists
            .iter()
            .map(|l| AtomicU32::new(l.lock().admission_bound(k).to_bits()))
            .collect();
        Self {
            points,
            origins,
            k,
            lists,
            bound,
            reverse_new: (0..n).map(|_| Mutex::new(Vec::new())).collect(),
            reverse_old: (0..n).map(|_| Mutex::new(Vec::new())).collect(),
            threads: threads.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Copy of the current lists.
    pub fn snapshot(&self) -> KnnGraph {
        KnnGraph::from_lists(self.k, self.lists.iter().map(|l| l.lock().clone()).collect())
    }

    pub fn into_graph(self) -> KnnGraph {
        KnnGraph::from_lists(self.k, self.lists.into_iter().map(Mutex::into_inner).collect())
    }

    /// One depth-first pass over all vertices.
    pub fn sweep(&mut self) -> Result<SweepStats> {
        let n = self.len();
        let visited: Vec<AtomicBool> = (0..n).map(|_| AtomicBool::new(false)).collect();
        if self.threads <= 1 {
            let mut s = Scratch::new();
            self.walk(0..n, &visited, &mut s);
            return Ok(SweepStats { insertions: s.insertions, ndc: s.ndc });
        }
        let threads = self.threads;
        let chunk = n.div_ceil(threads);
        let insertions = AtomicU64::new(0);
        let ndc = AtomicU64::new(0);
        let this = &*self;
        with_threads(threads, || {
            rayon::scope(|scope| {
                for t in 0..threads {
                    let range = (t * chunk).min(n)..((t + 1) * chunk).min(n);
                    let (visited, insertions, ndc) = (&visited, &insertions, &ndc);
                    scope.spawn(move |_| {
                        let mut s = Scratch::new();
                        this.walk(range, visited, &mut s);
                        insertions.fetch_add(s.insertions, Ordering::Relaxed);
                        ndc.fetch_add(s.ndc, Ordering::Relaxed);
                    });
                }
            })
        })?;
        Ok(SweepStats {
            insertions: insertions.into_inner(),
            ndc: ndc.into_inner(),
        })
    }

    /// Runs the indegree repair on the current lists.
    pub fn repair(&mut self) -> RepairReport {
        let lists = self.lists.iter_mut().map(|l| std::mem::take(l.get_mut())).collect();
        let mut g = KnnGraph::from_lists(self.k, lists);
        let report = indegree_repair(&mut g, self.points);
        for ((slot, list), b) in self.lists.iter_mut().zip(g.into_lists()).zip(&self.bound) {
            b.store(list.admission_bound(self.k).to_bits(), Ordering::Relaxed);
            *slot.get_mut() = list;
        }
        report
    }

    /// Depth-first traversal restarting from the lowest unclaimed id in
    /// `range`. Neighbors are pushed farthest first so the closest one is
    /// processed next.
    fn walk(&self, range: std::ops::Range<usize>, visited: &[AtomicBool], s: &mut Scratch) {
        for root in range {
            if visited[root].load(Ordering::Relaxed) {
                continue;
            }
            s.stack.clear();
            s.stack.push(root as u32);
            while let Some(v) = s.stack.pop() {
                if visited[v as usize].swap(true, Ordering::AcqRel) {
                    continue;
                }
                self.process(v, s);
                let list = self.lists[v as usize].lock();
                for e in list.entries().iter().rev() {
                    if !visited[e.id as usize].load(Ordering::Relaxed) {
                        s.stack.push(e.id);
                    }
                }
            }
        }
    }

    fn process(&self, v: u32, s: &mut Scratch) {
        s.new.clear();
        s.old.clear();
        // Snapshot and demote under the list lock, then publish reverse
        // entries without holding it.
        self.lists[v as usize].lock().visit(&mut s.new, &mut s.old);
        for &w in &s.new {
            self.reverse_new[w as usize].lock().push(v);
        }
        for &w in &s.old {
            self.reverse_old[w as usize].lock().push(v);
        }
        s.new.append(&mut self.reverse_new[v as usize].lock());
        s.old.append(&mut self.reverse_old[v as usize].lock());
        finish_candidates(&mut s.new, &mut s.old);

        let (new, old) = (&s.new, &s.old);
        for (i, &a) in new.iter().enumerate() {
            for &b in new[i + 1..].iter().chain(old.iter()) {
                if self.origins[a as usize] == self.origins[b as usize] {
                    continue;
                }
                let d = self.points.distance_between(a, b);
                s.ndc += 1;
                s.insertions += self.offer(a, b, d) as u64 + self.offer(b, a, d) as u64;
            }
        }
    }

    /// Offers `id` at distance `d` to `owner`'s list.
    #[inline]
    fn offer(&self, owner: u32, id: u32, d: f32) -> bool {
        let bound = f32::from_bits(self.bound[owner as usize].load(Ordering::Relaxed));
        // The exact (distance, id) comparison happens under the lock.
        if d > bound {
            return false;
        }
        let mut list = self.lists[owner as usize].lock();
        let changed = list.try_insert(id, d, self.k);
        if changed {
            self.bound[owner as usize].store(list.admission_bound(self.k).to_bits(), Ordering::Relaxed);
        }
        changed
    }
}

/// Per-sweep record produced by [`refine_knng`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepRecord {
    pub stats: SweepStats,
    pub seconds: f64,
    pub repair: Option<RepairReport>,
    pub repair_seconds: f64,
}

/// Runs `iterations` sweeps, each followed by an indegree repair when
/// `repair` is set. `observe` sees the graph after every sweep (and its
/// repair); pass `|_, _| {}` when not needed.
pub fn refine_knng<P: PointSet + Sync>(
    knng: KnnGraph,
    points: &P,
    origins: &[u32],
    iterations: usize,
    repair: bool,
    threads: usize,
    mut observe: impl FnMut(usize, &Refiner<'_, P>),
) -> Result<(KnnGraph, Vec<SweepRecord>)> {
    let mut refiner = Refiner::new(knng, points, origins, threads);
    let mut records = Vec::with_capacity(iterations);
    for it in 0..iterations {
        let t = std::time::Instant::now();
        let stats = refiner.sweep()?;
        let seconds = t.elapsed().as_secs_f64();
        let t = std::time::Instant::now();
        let report = repair.then(|| refiner.repair());
        records.push(SweepRecord {
            stats,
            seconds,
            repair: report,
            repair_seconds: t.elapsed().as_secs_f64(),
        });
        observe(it, &refiner);
    }
    Ok((refiner.into_graph(), records))
}
