use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the merged index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// A single layer with the medoid as enterpoint.
    #[default]
    Flat,
    /// The merged graph as base layer plus freshly built HNSW upper layers.
    Hierarchical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MergeParams {
    /// Outdegree of the k-NN graph and bound of the merged index.
    pub k: usize,
    /// Number of refinement sweeps.
    pub max_iterations: usize,
    pub seed: u64,
    /// Cross-query pool size. `None` uses the smallest pool that still
    /// guarantees `k` candidates per vertex.
    pub cross_pool_override: Option<usize>,
    /// Run the indegree repair after every refinement sweep.
    pub indegree_repair: bool,
    pub output: OutputKind,
    /// Pool size used when rebuilding upper layers.
    pub ef_construction: usize,
    pub threads: usize,
}

impl Default for MergeParams {
    fn default() -> Self {
        Self {
            k: 32,
            max_iterations: 3,
            seed: 0,
            cross_pool_override: None,
            indegree_repair: true,
            output: OutputKind::Flat,
            ef_construction: 200,
            threads: 1,
        }
    }
}

impl MergeParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be at least 1"));
        }
        if self.cross_pool_override == Some(0) {
            return Err(Error::param("cross pool size must be at least 1"));
        }
        if self.output == OutputKind::Hierarchical && self.k < 2 {
            return Err(Error::param("hierarchical output needs k >= 2"));
        }
        Ok(())
    }
}

/// Smallest cross-query pool that lets `h` indexes jointly supply `k`
/// candidates when every vertex already has `min_local_degree` local ones:
/// `ceil((k - min_local_degree) / (h - 1))`, at least 1.
pub fn minimum_pool_size(k: usize, h: usize, min_local_degree: usize) -> Result<usize> {
    if h < 2 {
        return Err(Error::param(format!("merging needs at least 2 indexes, got {h}")));
    }
    Ok(k.saturating_sub(min_local_degree).div_ceil(h - 1).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_size_examples() {
        assert_eq!(minimum_pool_size(32, 2, 0).unwrap(), 32);
        assert_eq!(minimum_pool_size(32, 5, 0).unwrap(), 8);
        assert_eq!(minimum_pool_size(30, 4, 6).unwrap(), 8);
        assert_eq!(minimum_pool_size(4, 2, 10).unwrap(), 1);
        assert!(matches!(minimum_pool_size(32, 1, 0), Err(Error::Param(_))));
    }

    #[test]
    fn params_validate() {
        assert!(MergeParams::default().validate().is_ok());
        let bad = MergeParams { k: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = MergeParams { max_iterations: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
