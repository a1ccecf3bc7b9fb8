//! Dataset ingestion, ground truth, index files and synthetic data.

mod index_file;
mod synthetic;
mod vecs;

pub use index_file::{decode_index, encode_index, load_index, save_index, FORMAT_VERSION, MAGIC};
pub use synthetic::{gen_synthetic, Distribution};
pub use vecs::{
    decode_bvecs, decode_fvecs, decode_ivecs, encode_fvecs, encode_ivecs, read_bvecs, read_fvecs,
    read_ivecs, write_fvecs, write_ivecs, GroundTruth,
};
