use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PointSet};
use crate::error::{Error, Result};
use crate::graph::ProximityGraph;
use crate::io::GroundTruth;
use crate::search::{search_index, Searcher};

use super::audit::{scc_count, zero_indegree_count};
use super::recall::recall_at_k;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One point of a recall/throughput curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    /// Pool size.
    pub l: usize,
    pub recall: f64,
    /// Queries per second, single-threaded.
    pub qps: f64,
    /// Mean distance evaluations per query.
    pub mean_ndc: f64,
}

/// Evaluation of one index.
///
/// JSON schema (version 1):
///
/// ```text
/// {
///   "schema_version": 1,
///   "k": usize,                       recall depth
///   "vertices": usize,
///   "edges": usize,                   base-layer edges
///   "points": [ {"l", "recall", "qps", "mean_ndc"}, ... ],
///   "build_or_merge_seconds": f64 | null,
///   "zero_indegree_count": usize,     base layer
///   "scc_count": usize                base layer
/// }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
    pub points: Vec<SearchPoint>,
    pub build_or_merge_seconds: Option<f64>,
    pub zero_indegree_count: usize,
    pub scc_count: usize,
}

impl EvalReport {
    /// Audits `graph` and attaches the given curve.
    pub fn new(graph: &ProximityGraph, k: usize, points: Vec<SearchPoint>, seconds: Option<f64>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            k,
            vertices: graph.num_vertices(),
            edges: graph.num_edges(),
            points,
            build_or_merge_seconds: seconds,
            zero_indegree_count: zero_indegree_count(graph),
            scc_count: scc_count(graph),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s).map_err(|e| Error::format(e.to_string()))?;
        if r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::format(format!("unsupported report version {}", r.schema_version)));
        }
        Ok(r)
    }
}

/// For each pool size, runs every query once untimed (warm-up) and once
/// timed on the calling thread, and reports Recall@k, QPS and mean NDC.
pub fn measure_search(
    graph: &ProximityGraph,
    data: &Dataset,
    queries: &Dataset,
    truth: &GroundTruth,
    l_grid: &[usize],
    k: usize,
) -> Result<Vec<SearchPoint>> {
    if let Some(&l) = l_grid.iter().find(|&&l| l < k) {
        return Err(Error::param(format!("pool size {l} is below k = {k}")));
    }
    if truth.len() != queries.len() {
        return Err(Error::param("ground truth and query counts differ"));
    }
    let mut searcher = Searcher::new();
    let mut out = Vec::with_capacity(l_grid.len());
    for &l in l_grid {
        let mut scratch = 0;
        for q in queries.iter() {
            search_index(&mut searcher, data, graph, q, l, k, &mut scratch)?;
        }
        let mut ndc = 0;
        let mut results = Vec::with_capacity(queries.len());
        let t = Instant::now();
        for q in queries.iter() {
            results.push(search_index(&mut searcher, data, graph, q, l, k, &mut ndc)?);
        }
        let secs = t.elapsed().as_secs_f64().max(1e-9);
        let nq = queries.len().max(1) as f64;
        out.push(SearchPoint {
            l,
            recall: recall_at_k(&results, truth, k)?,
            qps: queries.len() as f64 / secs,
            mean_ndc: ndc as f64 / nq,
        });
    }
    Ok(out)
}

/// Writes `(l, recall, qps, mean_ndc)` rows with a header line.
pub fn write_csv<W: Write>(points: &[SearchPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p).map_err(|e| Error::format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SearchPoint>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::format(e.to_string())))
        .collect()
}
