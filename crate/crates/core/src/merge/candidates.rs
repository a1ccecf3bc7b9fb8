//! First merge stage: cross-querying the inputs into a k-NN graph.

use crate::dataset::PointSet;
use crate::error::{Error, Result};
use crate::graph::ProximityGraph;
use crate::knng::{KnnGraph, NeighborList};
use crate::neighbor::{sort_dedup, Neighbor};
use crate::parallel::map_indexed;
use crate::search::{brute_force_knn, search_index, Searcher};

use super::input::MergeInput;
use super::params::{minimum_pool_size, MergeParams};

/// Stored out-neighbors of `u`, base layer only.
pub fn local_candidates(graph: &ProximityGraph, u: u32) -> Result<Vec<u32>> {
    if u as usize >= graph.num_vertices() {
        return Err(Error::Id { id: u as u64, n: graph.num_vertices() });
    }
    Ok(graph.neighbors(u).to_vec())
}

/// Queries every source except `own` with `query` using a pool (and result
/// count) of `pool_size`, maps hits to global ids, drops invalid ones and
/// deduplicates. Result sorted by `(distance, id)`.
pub fn cross_candidates(
    input: &MergeInput<'_>,
    own: usize,
    query: &[f32],
    pool_size: usize,
    searcher: &mut Searcher,
    ndc: &mut u64,
) -> Result<Vec<Neighbor>> {
    let mut out = Vec::new();
    for (j, src) in input.sources.iter().enumerate() {
        if j == own || src.graph.num_vertices() == 0 || input.id_map.valid_in_source(j) == 0 {
            continue;
        }
        let l = pool_size.min(src.graph.num_vertices());
        let hits = search_index(searcher, src.data, src.graph, query, l, l, ndc)?;
        push_mapped(input, j, &hits, &mut out);
    }
    sort_dedup(&mut out);
    Ok(out)
}

fn push_mapped(input: &MergeInput<'_>, source: usize, hits: &[Neighbor], out: &mut Vec<Neighbor>) {
    out.extend(
        hits.iter()
            .filter_map(|n| input.id_map.map(source, n.id).map(|g| Neighbor::new(g, n.distance))),
    );
}

/// Every valid vertex of every source except `exclude` itself, scored
/// exhaustively. Last resort when beam searches cannot supply enough
/// candidates (tiny sources, sparse valid ids, or local lists shorter than
/// the target degree).
fn exhaustive_candidates(input: &MergeInput<'_>, exclude: u32, query: &[f32], ndc: &mut u64) -> Result<Vec<Neighbor>> {
    let mut out = Vec::new();
    for (j, src) in input.sources.iter().enumerate() {
        if src.data.is_empty() {
            continue;
        }
        let hits = brute_force_knn(src.data, query, src.data.len())?;
        *ndc += src.data.len() as u64;
        push_mapped(input, j, &hits, &mut out);
    }
    out.retain(|n| n.id != exclude);
    sort_dedup(&mut out);
    Ok(out)
}

/// Result of the cross-querying stage.
#[derive(Clone, Debug)]
pub struct CrossQueryOutcome {
    pub knng: KnnGraph,
    /// Candidates held by each vertex before truncation to `k`.
    pub candidate_counts: Vec<u32>,
    /// Pool size used for the cross queries.
    pub pool_size: usize,
    /// Vertices whose first round fell short of `k` candidates and needed
    /// a wider pool.
    pub widened: usize,
    pub ndc: u64,
}

/// Builds the initial k-NN graph over the global id space: each valid
/// vertex gets its (valid) local neighbors plus the results of querying
/// every other source with its vector, sorted, deduplicated and truncated
/// to `k`. All entries start flagged New.
///
/// Without `cross_pool_override`, a vertex that still has fewer than
/// `min(k, total - 1)` candidates (tiny sources, invalid ids filtered out,
/// short local lists or unreachable regions) is re-queried with doubled
/// pools and finally scored against every valid vertex, so every vertex is
/// guaranteed that many candidates.
pub fn pgs_to_knng(input: &MergeInput<'_>, params: &MergeParams) -> Result<CrossQueryOutcome> {
    params.validate()?;
    let h = input.num_sources();
    let pool_size = match params.cross_pool_override {
        Some(l) => l,
        None => minimum_pool_size(params.k, h, 0)?,
    };
    let total = input.id_map.total_valid();
    let k = params.k;
    let needed = k.min(total - 1);
    let largest = input.sources.iter().map(|s| s.graph.num_vertices()).max().unwrap_or(0);

    let rows = map_indexed(
        params.threads,
        total,
        || (Searcher::new(), 0u64),
        |(searcher, ndc), g| -> Result<(NeighborList, u32, bool, u64)> {
            let before = *ndc;
            let (s, u) = input.id_map.inverse(g as u32);
            let src = input.sources[s];
            let query = src.data.vector(u);
            let mut local = Vec::new();
            for w in local_candidates(src.graph, u)? {
                if let Some(gw) = input.id_map.map(s, w) {
                    local.push(Neighbor::new(gw, src.data.distance_between(u, w)));
                    *ndc += 1;
                }
            }
            let mut pool = pool_size;
            let mut widened = false;
            let mut cands;
            loop {
                cands = local.clone();
                cands.extend(cross_candidates(input, s, query, pool, searcher, ndc)?);
                sort_dedup(&mut cands);
                if params.cross_pool_override.is_some() || cands.len() >= needed {
                    break;
                }
                widened = true;
                if pool >= largest {
                    cands = exhaustive_candidates(input, g as u32, query, ndc)?;
                    break;
                }
                pool = (pool * 2).min(largest);
            }
            let count = cands.len() as u32;
            cands.truncate(k);
            Ok((NeighborList::from_sorted(cands), count, widened, *ndc - before))
        },
    )?;

    let mut lists = Vec::with_capacity(total);
    let mut candidate_counts = Vec::with_capacity(total);
    let mut widened = 0;
    let mut ndc = 0;
    for row in rows {
        let (list, count, w, d) = row?;
        lists.push(list);
        candidate_counts.push(count);
        widened += w as usize;
        ndc += d;
    }
    Ok(CrossQueryOutcome {
        knng: KnnGraph::from_lists(k, lists),
        candidate_counts,
        pool_size,
        widened,
        ndc,
    })
}
