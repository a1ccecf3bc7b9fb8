use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::build::rebuild_hnsw_layers;
use crate::dataset::{Dataset, PointSet};
use crate::error::Result;
use crate::graph::ProximityGraph;

use super::candidates::pgs_to_knng;
use super::input::MergeInput;
use super::params::{MergeParams, OutputKind};
use super::refine::refine_knng;
use super::select::knng_to_pg;

/// Timing and cost of one pipeline stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub seconds: f64,
    pub ndc: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_indegree_before: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_indegree_after: Option<usize>,
}

impl StageReport {
    fn new(name: impl Into<String>, seconds: f64, ndc: u64) -> Self {
        Self {
            name: name.into(),
            seconds,
            ndc,
            zero_indegree_before: None,
            zero_indegree_after: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub vertices: usize,
    pub k: usize,
    pub cross_pool_size: usize,
    /// Vertices that needed a wider cross-query pool to reach `k` candidates.
    pub widened_vertices: usize,
    pub stages: Vec<StageReport>,
    pub total_seconds: f64,
    pub total_ndc: u64,
    /// Vertices of the output's base layer nobody points to.
    pub zero_indegree: usize,
}

#[derive(Clone, Debug)]
pub struct MergeOutput {
    pub graph: ProximityGraph,
    /// The merged vectors, indexed by global id.
    pub data: Dataset,
    pub report: MergeReport,
}

/// Merges the input indexes into one over the global id space: cross-query
/// into a k-NN graph, refine it, select a proximity graph and optionally
/// rebuild an HNSW hierarchy on top.
///
/// Single-threaded runs are deterministic for a fixed seed.
pub fn fgim_merge(input: &MergeInput<'_>, params: &MergeParams) -> Result<MergeOutput> {
    params.validate()?;
    let start = Instant::now();
    let mut stages = Vec::new();

    let t = Instant::now();
    let data = input.merged_dataset();
    let origins = input.id_map.origins();
    let seeded = pgs_to_knng(input, params)?;
    stages.push(StageReport::new("pgs_to_knng", t.elapsed().as_secs_f64(), seeded.ndc));

    let (knng, sweeps) = refine_knng(
        seeded.knng,
        &data,
        &origins,
        params.max_iterations,
        params.indegree_repair,
        params.threads,
        |_, _| {},
    )?;
    for (i, s) in sweeps.iter().enumerate() {
        stages.push(StageReport::new(format!("refine_sweep_{}", i + 1), s.seconds, s.stats.ndc));
        if let Some(r) = &s.repair {
            let mut st = StageReport::new(format!("indegree_repair_{}", i + 1), s.repair_seconds, r.ndc);
            st.zero_indegree_before = Some(r.zero_indegree_before);
            st.zero_indegree_after = Some(r.zero_indegree_after);
            stages.push(st);
        }
    }

    let t = Instant::now();
    let indegrees = knng.indegrees();
    let sel = knng_to_pg(&knng, &indegrees, params.k, &data, data.metric(), params.seed, params.threads)?;
    let mut st = StageReport::new("knng_to_pg", t.elapsed().as_secs_f64(), sel.ndc);
    st.zero_indegree_before = Some(count_zero(&indegrees));
    let mut graph = sel.graph;
    st.zero_indegree_after = Some(zero_indegree(&graph));
    stages.push(st);

    if params.output == OutputKind::Hierarchical {
        let t = Instant::now();
        graph = rebuild_hnsw_layers(&graph, &data, params.k, params.ef_construction, params.seed, params.threads)?;
        stages.push(StageReport::new("rebuild_hnsw_layers", t.elapsed().as_secs_f64(), 0));
    }

    let report = MergeReport {
        vertices: data.len(),
        k: params.k,
        cross_pool_size: seeded.pool_size,
        widened_vertices: seeded.widened,
        total_ndc: stages.iter().map(|s| s.ndc).sum(),
        stages,
        total_seconds: start.elapsed().as_secs_f64(),
        zero_indegree: zero_indegree(&graph),
    };
    Ok(MergeOutput { graph, data, report })
}

fn count_zero(t: &[u32]) -> usize {
    t.iter().filter(|&&x| x == 0).count()
}

fn zero_indegree(g: &ProximityGraph) -> usize {
    let mut t = vec![0u32; g.num_vertices()];
    for l in g.adjacency() {
        for &w in l {
            t[w as usize] += 1;
        }
    }
    count_zero(&t)
}
