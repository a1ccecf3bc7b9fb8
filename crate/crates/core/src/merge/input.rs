use crate::dataset::{Dataset, PointSet};
use crate::error::{Error, Result};
use crate::graph::ProximityGraph;
use crate::idmap::IdMap;

/// One index to merge together with the vectors its local ids refer to.
#[derive(Clone, Copy, Debug)]
pub struct MergeSource<'a> {
    pub graph: &'a ProximityGraph,
    pub data: &'a Dataset,
}

impl<'a> MergeSource<'a> {
    pub fn new(graph: &'a ProximityGraph, data: &'a Dataset) -> Self {
        Self { graph, data }
    }
}

#[derive(Clone, Debug)]
pub struct MergeInput<'a> {
    pub sources: Vec<MergeSource<'a>>,
    pub id_map: IdMap,
}

impl<'a> MergeInput<'a> {
    /// Checks that the inputs can be merged: at least two sources sharing
    /// dimension and metric, graphs matching their datasets, an id map
    /// sized for the sources, and at least one valid vertex.
    pub fn new(sources: Vec<MergeSource<'a>>, id_map: IdMap) -> Result<Self> {
        if sources.len() < 2 {
            return Err(Error::param(format!(
                "merging needs at least 2 indexes, got {}",
                sources.len()
            )));
        }
        let dim = sources.iter().map(|s| s.data.dim()).find(|&d| d > 0).unwrap_or(0);
        let metric = sources[0].data.metric();
        for (i, s) in sources.iter().enumerate() {
            if s.graph.num_vertices() != s.data.len() {
                return Err(Error::param(format!(
                    "index {i} has {} vertices but its dataset has {} vectors",
                    s.graph.num_vertices(),
                    s.data.len()
                )));
            }
            if !s.data.is_empty() && s.data.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: s.data.dim() });
            }
            if s.data.metric() != metric || s.graph.metric() != metric {
                return Err(Error::param(format!("index {i} uses a different metric")));
            }
            if id_map.num_sources() != sources.len() || id_map.source_len(i) != s.data.len() {
                return Err(Error::param(format!("id map does not describe index {i}")));
            }
        }
        if id_map.total_valid() == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self { sources, id_map })
    }

    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn dim(&self) -> usize {
        self.sources.iter().map(|s| s.data.dim()).find(|&d| d > 0).unwrap_or(0)
    }

    /// Vector of global vertex `g`.
    pub fn vector(&self, g: u32) -> &'a [f32] {
        let (s, local) = self.id_map.inverse(g);
        self.sources[s].data.vector(local)
    }

    /// The valid vectors of all sources, indexed by global id.
    pub fn merged_dataset(&self) -> Dataset {
        let total = self.id_map.total_valid();
        let dim = self.dim();
        let mut flat = Vec::with_capacity(total * dim);
        for g in 0..total as u32 {
            flat.extend_from_slice(self.vector(g));
        }
        Dataset::from_flat(dim, self.sources[0].data.metric(), flat)
            .expect("source vectors were validated on ingestion")
    }
}
