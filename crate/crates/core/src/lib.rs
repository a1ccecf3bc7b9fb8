//! Building, merging and evaluating graph-based approximate nearest
//! neighbor indexes.
//!
//! The merge pipeline turns several proximity graphs into one: the inputs
//! are cross-queried into a k-nearest-neighbor graph, that graph is refined
//! in place, and a bounded-degree proximity graph is selected from it (with
//! an optional rebuilt HNSW hierarchy on top).

pub mod build;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod graph;
pub mod idmap;
pub mod io;
pub mod knng;
pub mod merge;
pub mod metric;
pub mod neighbor;
mod parallel;
pub mod pool;
pub mod search;

pub use dataset::{Dataset, PointSet};
pub use error::{Error, Result};
pub use graph::{GraphView, ProximityGraph};
pub use idmap::IdMap;
pub use knng::KnnGraph;
pub use metric::Metric;
pub use neighbor::{Flag, Neighbor};
