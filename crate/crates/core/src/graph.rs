//! Proximity graphs: bounded-degree adjacency over dense vertex ids, either
//! flat or with HNSW-style upper layers.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::metric::Metric;

/// Anything a beam search can walk.
pub trait GraphView {
    fn num_vertices(&self) -> usize;

    /// Replaces the contents of `out` with the out-neighbors of `u`.
    fn neighbors_into(&self, u: u32, out: &mut Vec<u32>);
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hierarchy {
    levels: Vec<u8>,
    /// `upper[v][l - 1]` is the adjacency of `v` on layer `l`.
    upper: Vec<Vec<Vec<u32>>>,
}

impl Hierarchy {
    pub fn new(levels: Vec<u8>, upper: Vec<Vec<Vec<u32>>>) -> Self {
        Self { levels, upper }
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn layer_len(&self, level: usize) -> usize {
        self.levels.iter().filter(|&&l| l as usize >= level).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProximityGraph {
    metric: Metric,
    dim: usize,
    max_degree: usize,
    upper_degree: usize,
    adjacency: Vec<Vec<u32>>,
    hierarchy: Option<Hierarchy>,
    enterpoint: Option<u32>,
}

impl ProximityGraph {
    pub fn flat(
        metric: Metric,
        dim: usize,
        max_degree: usize,
        adjacency: Vec<Vec<u32>>,
        enterpoint: Option<u32>,
    ) -> Result<Self> {
        let g = Self {
            metric,
            dim,
            max_degree,
            upper_degree: max_degree,
            adjacency,
            hierarchy: None,
            enterpoint,
        };
        g.validate()?;
        Ok(g)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn hierarchical(
        metric: Metric,
        dim: usize,
        max_degree: usize,
        upper_degree: usize,
        adjacency: Vec<Vec<u32>>,
        hierarchy: Hierarchy,
        enterpoint: Option<u32>,
    ) -> Result<Self> {
        let g = Self {
            metric,
            dim,
            max_degree,
            upper_degree,
            adjacency,
            hierarchy: Some(hierarchy),
            enterpoint,
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks every structural invariant: degree bounds, id range, no
    /// self-loops or repeated ids, layer containment and a valid enterpoint.
    pub fn validate(&self) -> Result<()> {
        let n = self.adjacency.len();
        let bad = |msg: String| Err(Error::format(msg));
        if n > u32::MAX as usize {
            return bad("too many vertices".into());
        }
        match self.enterpoint {
            None if n > 0 => return bad("non-empty graph without an enterpoint".into()),
            Some(ep) if ep as usize >= n => return Err(Error::Id { id: ep as u64, n }),
            _ => {}
        }
        check_lists(self.adjacency.iter().enumerate(), n, self.max_degree, |_| true)?;
        if let Some(h) = &self.hierarchy {
            if h.levels.len() != n || h.upper.len() != n {
                return bad("hierarchy size does not match vertex count".into());
            }
            for (v, (layers, &lvl)) in h.upper.iter().zip(&h.levels).enumerate() {
                if layers.len() != lvl as usize {
                    return bad(format!("vertex {v} has {} upper layers but level {lvl}", layers.len()));
                }
            }
            for level in 1..=h.max_level() {
                let lists = h
                    .upper
                    .iter()
                    .enumerate()
                    .filter(|(v, _)| h.levels[*v] as usize >= level)
                    .map(|(v, layers)| (v, &layers[level - 1]));
                check_lists(lists, n, self.upper_degree, |w| h.levels[w as usize] as usize >= level)?;
            }
            if let Some(ep) = self.enterpoint {
                if h.levels[ep as usize] as usize != h.max_level() {
                    return bad("enterpoint is not on the top layer".into());
                }
            }
        }
        Ok(())
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Base-layer degree bound.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Degree bound on layers above the base (equals `max_degree` when flat).
    pub fn upper_degree(&self) -> usize {
        self.upper_degree
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn enterpoint(&self) -> Option<u32> {
        self.enterpoint
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adjacency[u as usize]
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    pub fn hierarchy(&self) -> Option<&Hierarchy> {
        self.hierarchy.as_ref()
    }

    pub fn is_hierarchical(&self) -> bool {
        self.hierarchy.is_some()
    }

    pub fn level(&self, u: u32) -> usize {
        self.hierarchy
            .as_ref()
            .map_or(0, |h| h.levels[u as usize] as usize)
    }

    pub fn max_level(&self) -> usize {
        self.hierarchy.as_ref().map_or(0, Hierarchy::max_level)
    }

    /// Adjacency of `u` on `level`; empty if `u` does not reach that level.
    pub fn layer_neighbors(&self, u: u32, level: usize) -> &[u32] {
        if level == 0 {
            return &self.adjacency[u as usize];
        }
        match &self.hierarchy {
            Some(h) if h.levels[u as usize] as usize >= level => &h.upper[u as usize][level - 1],
            _ => &[],
        }
    }

    pub fn layer(&self, level: usize) -> LayerView<'_> {
        LayerView { graph: self, level }
    }

    /// Drops the upper layers, keeping the base layer and enterpoint.
    pub fn flatten(&self) -> ProximityGraph {
        ProximityGraph {
            metric: self.metric,
            dim: self.dim,
            max_degree: self.max_degree,
            upper_degree: self.max_degree,
            adjacency: self.adjacency.clone(),
            hierarchy: None,
            enterpoint: self.enterpoint,
        }
    }

    pub fn into_adjacency(self) -> Vec<Vec<u32>> {
        self.adjacency
    }
}

fn check_lists<'a>(
    lists: impl Iterator<Item = (usize, &'a Vec<u32>)>,
    n: usize,
    bound: usize,
    member: impl Fn(u32) -> bool,
) -> Result<()> {
    let mut seen = HashSet::new();
    for (v, list) in lists {
        if list.len() > bound {
            return Err(Error::format(format!(
                "vertex {v} has degree {} above bound {bound}",
                list.len()
            )));
        }
        seen.clear();
        for &w in list {
            if w as usize >= n {
                return Err(Error::Id { id: w as u64, n });
            }
            if w as usize == v {
                return Err(Error::format(format!("self-loop on vertex {v}")));
            }
            if !seen.insert(w) {
                return Err(Error::format(format!("vertex {v} lists {w} twice")));
            }
            if !member(w) {
                return Err(Error::format(format!(
                    "vertex {v} links to {w}, which is missing from that layer"
                )));
            }
        }
    }
    Ok(())
}

impl GraphView for ProximityGraph {
    fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    fn neighbors_into(&self, u: u32, out: &mut Vec<u32>) {
        out.clear();
        out.extend_from_slice(&self.adjacency[u as usize]);
    }
}

/// One layer of a (possibly hierarchical) graph.
#[derive(Clone, Copy)]
pub struct LayerView<'a> {
    graph: &'a ProximityGraph,
    level: usize,
}

impl GraphView for LayerView<'_> {
    fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    fn neighbors_into(&self, u: u32, out: &mut Vec<u32>) {
        out.clear();
        out.extend_from_slice(self.graph.layer_neighbors(u, self.level));
    }
}

impl GraphView for Vec<Vec<u32>> {
    fn num_vertices(&self) -> usize {
        self.len()
    }

    fn neighbors_into(&self, u: u32, out: &mut Vec<u32>) {
        out.clear();
        out.extend_from_slice(&self[u as usize]);
    }
}
