use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::io::GroundTruth;
use crate::neighbor::Neighbor;

/// Mean over queries of `|R ∩ T| / k`, where `R` is the first `k` results
/// and `T` the first `k` true neighbors.
///
/// When the truth carries distances, a returned id outside `T` still counts
/// if its distance equals the k-th true distance: it ties with the boundary
/// and is an equally correct answer. The count never exceeds `k`.
pub fn recall_at_k(results: &[Vec<Neighbor>], truth: &GroundTruth, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if results.len() != truth.len() {
        return Err(Error::param(format!(
            "{} result lists for {} ground-truth queries",
            results.len(),
            truth.len()
        )));
    }
    if truth.depth() < k {
        return Err(Error::param(format!(
            "ground truth holds {} neighbors per query, cannot score recall@{k}",
            truth.depth()
        )));
    }
    if results.is_empty() {
        return Ok(1.0);
    }
    let mut total = 0.0;
    let mut set = HashSet::new();
    for (q, res) in results.iter().enumerate() {
        set.clear();
        set.extend(truth.ids[q][..k].iter().copied());
        let boundary = truth.distances.as_ref().map(|d| d[q][k - 1]);
        let hits = res
            .iter()
            .take(k)
            .filter(|n| set.contains(&n.id) || boundary.is_some_and(|b| n.distance <= b))
            .count();
        total += hits.min(k) as f64 / k as f64;
    }
    Ok(total / results.len() as f64)
}

/// Fraction of the edges of `exact` that also appear in `approx`, pooled
/// over all vertices.
pub fn edge_recall(approx: &[Vec<u32>], exact: &[Vec<u32>]) -> f64 {
    let mut hit = 0usize;
    let mut all = 0usize;
    for (a, e) in approx.iter().zip(exact) {
        let a: HashSet<u32> = a.iter().copied().collect();
        hit += e.iter().filter(|w| a.contains(w)).count();
        all += e.len();
    }
    if all == 0 {
        1.0
    } else {
        hit as f64 / all as f64
    }
}
