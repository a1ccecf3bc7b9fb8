use crate::dataset::{Dataset, PointSet};
use crate::error::{Error, Result};
use crate::io::GroundTruth;
use crate::neighbor::Neighbor;
use crate::parallel::map_indexed;
use crate::search::brute_force_knn;

/// Exact `k` nearest base vectors of every query, with distances.
pub fn compute_ground_truth(base: &Dataset, queries: &Dataset, k: usize, threads: usize) -> Result<GroundTruth> {
    if k > base.len() {
        return Err(Error::param(format!("k = {k} exceeds the {} base vectors", base.len())));
    }
    if !queries.is_empty() && queries.dim() != base.dim() {
        return Err(Error::Dimension { expected: base.dim(), got: queries.dim() });
    }
    let lists = map_indexed(threads, queries.len(), || (), |_, q| {
        brute_force_knn(base, queries.vector(q as u32), k)
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(GroundTruth::from_neighbors(&lists))
}

/// Exact k-NN graph: for every vertex its `k` closest other vertices.
pub fn exact_knn_graph<P: PointSet + Sync>(points: &P, k: usize, threads: usize) -> Result<Vec<Vec<Neighbor>>> {
    let n = points.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if k >= n {
        return Err(Error::param(format!("k = {k} needs more than {n} points")));
    }
    map_indexed(threads, n, || (), |_, u| {
        let mut l = brute_force_knn(points, points.vector(u as u32), k + 1)?;
        // The vertex itself is normally first, but an exact duplicate with a
        // lower id can precede it.
        l.retain(|x| x.id != u as u32);
        l.truncate(k);
        Ok(l)
    })?
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Metric;

    #[test]
    fn queries_from_base_hit_distance_zero() {
        let base = Dataset::from_rows(&[[0.0f32, 0.0], [1.0, 0.0], [5.0, 0.0]], Metric::Euclidean).unwrap();
        let gt = compute_ground_truth(&base, &base, 2, 1).unwrap();
        assert_eq!(gt.ids, vec![vec![0, 1], vec![1, 0], vec![2, 1]]);
        assert!(gt.distances.unwrap().iter().all(|d| d[0] == 0.0));
        assert!(compute_ground_truth(&base, &base, 4, 1).is_err());
    }

    #[test]
    fn knn_graph_excludes_self() {
        let base = Dataset::from_rows(&[[0.0f32], [1.0], [3.0]], Metric::Euclidean).unwrap();
        let g = exact_knn_graph(&base, 1, 1).unwrap();
        let ids: Vec<u32> = g.iter().map(|l| l[0].id).collect();
        assert_eq!(ids, vec![1, 0, 1]);
    }
}
