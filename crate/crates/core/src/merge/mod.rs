//! Merging several proximity-graph indexes into one.
//!
//! The pipeline runs in three stages: [`pgs_to_knng`] cross-queries the
//! inputs into a k-NN graph, [`refine_knng`] improves that graph in place
//! (with [`indegree_repair`] after every sweep), and [`knng_to_pg`] selects
//! the final bounded-degree graph. [`fgim_merge`] composes them.

mod candidates;
mod composition;
mod input;
mod params;
mod pipeline;
mod refine;
mod repair;
mod select;

pub use candidates::{cross_candidates, local_candidates, pgs_to_knng, CrossQueryOutcome};
pub use composition::{neighbor_composition, CompositionReport};
pub use input::{MergeInput, MergeSource};
pub use params::{minimum_pool_size, MergeParams, OutputKind};
pub use pipeline::{fgim_merge, MergeOutput, MergeReport, StageReport};
pub use refine::{refine_knng, refine_update, refine_visit, Refiner, SweepRecord, SweepStats};
pub use repair::{indegree_repair, RepairReport};
pub use select::{knng_to_pg, Selection};
pub use crate::build::rebuild_hnsw_layers;
