//! Measurement harness: recall, throughput, distance counts and graph
//! structure audits.

mod audit;
mod recall;
mod report;
mod truth;

pub use audit::{scc_count, zero_indegree_count};
pub use recall::{edge_recall, recall_at_k};
pub use report::{measure_search, read_csv, write_csv, EvalReport, SearchPoint, REPORT_SCHEMA_VERSION};
pub use truth::{compute_ground_truth, exact_knn_graph};
