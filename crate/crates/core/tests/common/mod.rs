//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use fgim_core::build::{build_hnsw, build_vamana, HnswParams, VamanaParams};
use fgim_core::dataset::{Dataset, PointSet};
use fgim_core::eval::{compute_ground_truth, exact_knn_graph};
use fgim_core::io::{gen_synthetic, Distribution, GroundTruth};
use fgim_core::merge::{MergeInput, MergeSource};
use fgim_core::metric::Metric;
use fgim_core::neighbor::Neighbor;
use fgim_core::{GraphView, IdMap, KnnGraph, ProximityGraph};

pub fn uniform(n: usize, dim: usize, seed: u64) -> Dataset {
    gen_synthetic(n, dim, seed, Distribution::UniformCube, Metric::Euclidean)
}

/// Splits `data` into `parts` contiguous, nearly equal shards.
pub fn split(data: &Dataset, parts: usize) -> Vec<Dataset> {
    let n = data.len();
    (0..parts)
        .map(|i| data.slice(i * n / parts, (i + 1) * n / parts))
        .collect()
}

pub fn build_all_vamana(parts: &[Dataset], params: &VamanaParams, seed: u64) -> Vec<ProximityGraph> {
    parts
        .iter()
        .enumerate()
        .map(|(i, d)| build_vamana(d, params, seed + i as u64, 1).unwrap())
        .collect()
}

pub fn build_all_hnsw(parts: &[Dataset], params: &HnswParams, seed: u64) -> Vec<ProximityGraph> {
    parts
        .iter()
        .enumerate()
        .map(|(i, d)| build_hnsw(d, params, seed + i as u64, 1).unwrap())
        .collect()
}

/// Merge input over all parts with every vertex valid.
pub fn input<'a>(graphs: &'a [ProximityGraph], parts: &'a [Dataset]) -> MergeInput<'a> {
    let sources = graphs.iter().zip(parts).map(|(g, d)| MergeSource::new(g, d)).collect();
    let sizes: Vec<usize> = parts.iter().map(Dataset::len).collect();
    MergeInput::new(sources, IdMap::sequential(&sizes)).unwrap()
}

/// Exact k-NN lists as plain ids.
pub fn exact_ids(points: &Dataset, k: usize) -> Vec<Vec<u32>> {
    exact_knn_graph(points, k, 1)
        .unwrap()
        .into_iter()
        .map(|l| l.into_iter().map(|n| n.id).collect())
        .collect()
}

pub fn truth(base: &Dataset, queries: &Dataset, k: usize) -> GroundTruth {
    compute_ground_truth(base, queries, k, 1).unwrap()
}

/// Reference top-k: score everything, full sort by `(distance, id)`.
pub fn sort_oracle_knn<P: PointSet>(points: &P, query: &[f32], k: usize) -> Vec<Neighbor> {
    let mut all: Vec<Neighbor> = (0..points.len() as u32)
        .map(|i| Neighbor::new(i, points.distance_to(query, i)))
        .collect();
    all.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)));
    all.truncate(k);
    all
}

/// Reference pool contents: the `cap` smallest `(distance, id)` pairs after
/// collapsing repeated ids to their first occurrence.
pub fn pool_oracle(inserts: &[(u32, f32)], cap: usize) -> Vec<(u32, f32)> {
    let mut seen = HashSet::new();
    let mut firsts: Vec<(u32, f32)> = inserts.iter().copied().filter(|(id, _)| seen.insert(*id)).collect();
    firsts.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    firsts.truncate(cap);
    firsts
}

/// Strongly connected components by mutual reachability, O(n * (n + m)).
pub fn scc_oracle(adj: &[Vec<u32>]) -> usize {
    let n = adj.len();
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w as usize);
                    }
                }
            }
            seen
        })
        .collect();
    let mut assigned = vec![false; n];
    let mut count = 0;
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        count += 1;
        for w in v..n {
            if reach[v][w] && reach[w][v] {
                assigned[w] = true;
            }
        }
    }
    count
}

pub fn adjacency<G: GraphView>(g: &G) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(g.num_vertices());
    let mut buf = Vec::new();
    for v in 0..g.num_vertices() as u32 {
        g.neighbors_into(v, &mut buf);
        out.push(buf.clone());
    }
    out
}

pub fn outdegrees(g: &KnnGraph) -> Vec<usize> {
    g.lists().iter().map(|l| l.len()).collect()
}

/// Pooled edge recall of `knng` against exact lists.
pub fn knng_edge_recall(knng: &KnnGraph, exact: &[Vec<u32>]) -> f64 {
    fgim_core::eval::edge_recall(&knng.to_adjacency(), exact)
}

/// Random structurally valid graph: flat or hierarchical, `n <= max_n`,
/// degree bound `<= max_k`.
pub fn random_graph<R: rand::Rng>(rng: &mut R, max_n: usize, max_k: usize) -> ProximityGraph {
    use fgim_core::graph::Hierarchy;
    use rand::seq::index::sample;

    let n = rng.random_range(0..=max_n);
    let k = rng.random_range(1..=max_k);
    let metric = if rng.random_bool(0.5) { Metric::Euclidean } else { Metric::Cosine };
    let dim = rng.random_range(1..=64);
    let pick = |rng: &mut R, pool: &[u32], owner: u32, bound: usize| -> Vec<u32> {
        let others: Vec<u32> = pool.iter().copied().filter(|&w| w != owner).collect();
        let take = rng.random_range(0..=bound.min(others.len()));
        sample(rng, others.len(), take).into_iter().map(|i| others[i]).collect()
    };
    let all: Vec<u32> = (0..n as u32).collect();
    let adjacency: Vec<Vec<u32>> = (0..n as u32).map(|v| pick(rng, &all, v, k)).collect();
    if n == 0 || rng.random_bool(0.5) {
        let ep = (n > 0).then(|| rng.random_range(0..n as u32));
        return ProximityGraph::flat(metric, dim, k, adjacency, ep).unwrap();
    }
    let upper_k = rng.random_range(1..=k);
    let levels: Vec<u8> = (0..n).map(|_| if rng.random_bool(0.3) { rng.random_range(1..=3) } else { 0 }).collect();
    let top = *levels.iter().max().unwrap();
    let members = |l: u8| -> Vec<u32> { (0..n as u32).filter(|&v| levels[v as usize] >= l).collect() };
    let upper: Vec<Vec<Vec<u32>>> = (0..n as u32)
        .map(|v| (1..=levels[v as usize]).map(|l| pick(rng, &members(l), v, upper_k)).collect())
        .collect();
    let ep = *members(top).first().unwrap();
    ProximityGraph::hierarchical(metric, dim, k, upper_k, adjacency, Hierarchy::new(levels, upper), Some(ep)).unwrap()
}
