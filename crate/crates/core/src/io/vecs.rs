//! TexMex `.fvecs` / `.ivecs` / `.bvecs` files: a sequence of records, each
//! a little-endian `i32` dimension followed by that many little-endian
//! payload values (`f32`, `i32` or `u8`).

use std::fs;
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian};

use crate::dataset::{Dataset, PointSet};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::neighbor::Neighbor;

/// True nearest neighbors per query, closest first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundTruth {
    pub ids: Vec<Vec<u32>>,
    /// Matching distances when known (computed in-process rather than read
    /// from an `.ivecs` file). Enables tie-tolerant recall.
    pub distances: Option<Vec<Vec<f32>>>,
}

impl GroundTruth {
    pub fn from_ids(ids: Vec<Vec<u32>>) -> Self {
        Self { ids, distances: None }
    }

    pub fn from_neighbors(lists: &[Vec<Neighbor>]) -> Self {
        Self {
            ids: lists.iter().map(|l| l.iter().map(|n| n.id).collect()).collect(),
            distances: Some(lists.iter().map(|l| l.iter().map(|n| n.distance).collect()).collect()),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Largest k every query supports.
    pub fn depth(&self) -> usize {
        self.ids.iter().map(Vec::len).min().unwrap_or(0)
    }
}

/// Splits `bytes` into records of `elem` bytes per value. Returns the
/// common dimension (0 for an empty input) and the payload slices.
fn records(bytes: &[u8], elem: usize) -> Result<(usize, Vec<&[u8]>)> {
    let mut dim: Option<usize> = None;
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        if bytes.len() - pos < 4 {
            return Err(Error::format(format!("truncated record header at byte {pos}")));
        }
        let d = LittleEndian::read_i32(&bytes[pos..pos + 4]);
        if d <= 0 {
            return Err(Error::format(format!("non-positive dimension {d} at byte {pos}")));
        }
        let d = d as usize;
        match dim {
            None => dim = Some(d),
            Some(expected) if expected != d => {
                return Err(Error::format(format!(
                    "record at byte {pos} has dimension {d}, expected {expected}"
                )))
            }
            _ => {}
        }
        pos += 4;
        let len = d
            .checked_mul(elem)
            .ok_or_else(|| Error::format("dimension overflows"))?;
        if bytes.len() - pos < len {
            return Err(Error::format(format!("truncated record payload at byte {pos}")));
        }
        out.push(&bytes[pos..pos + len]);
        pos += len;
    }
    Ok((dim.unwrap_or(0), out))
}

pub fn decode_fvecs(bytes: &[u8], metric: Metric) -> Result<Dataset> {
    let (dim, recs) = records(bytes, 4)?;
    let mut data = vec![0.0f32; dim * recs.len()];
    for (r, chunk) in recs.iter().zip(data.chunks_exact_mut(dim.max(1))) {
        LittleEndian::read_f32_into(r, chunk);
    }
    Dataset::from_flat(dim, metric, data).map_err(|e| match e {
        Error::Format(_) => e,
        other => Error::format(other.to_string()),
    })
}

pub fn decode_bvecs(bytes: &[u8], metric: Metric) -> Result<Dataset> {
    let (dim, recs) = records(bytes, 1)?;
    let data: Vec<f32> = recs.iter().flat_map(|r| r.iter().map(|&b| b as f32)).collect();
    Dataset::from_flat(dim, metric, data).map_err(|e| Error::format(e.to_string()))
}

pub fn decode_ivecs(bytes: &[u8]) -> Result<GroundTruth> {
    let (_, recs) = records(bytes, 4)?;
    let mut ids = Vec::with_capacity(recs.len());
    for r in recs {
        let mut row = vec![0i32; r.len() / 4];
        LittleEndian::read_i32_into(r, &mut row);
        if row.iter().any(|&x| x < 0) {
            return Err(Error::format("negative id in ivecs record"));
        }
        ids.push(row.into_iter().map(|x| x as u32).collect());
    }
    Ok(GroundTruth::from_ids(ids))
}

pub fn read_fvecs(path: impl AsRef<Path>, metric: Metric) -> Result<Dataset> {
    decode_fvecs(&fs::read(path)?, metric)
}

pub fn read_bvecs(path: impl AsRef<Path>, metric: Metric) -> Result<Dataset> {
    decode_bvecs(&fs::read(path)?, metric)
}

pub fn read_ivecs(path: impl AsRef<Path>) -> Result<GroundTruth> {
    decode_ivecs(&fs::read(path)?)
}

pub fn encode_fvecs(data: &Dataset) -> Vec<u8> {
    let dim = data.dim();
    let mut out = Vec::with_capacity(data.len() * (4 + 4 * dim));
    for row in data.iter().take(data.len()) {
        out.extend_from_slice(&(dim as i32).to_le_bytes());
        for x in row {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn encode_ivecs(rows: &[Vec<u32>]) -> Vec<u8> {
    let mut out = Vec::new();
    for row in rows {
        out.extend_from_slice(&(row.len() as i32).to_le_bytes());
        for &x in row {
            out.extend_from_slice(&(x as i32).to_le_bytes());
        }
    }
    out
}

pub fn write_fvecs(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    Ok(fs::write(path, encode_fvecs(data))?)
}

pub fn write_ivecs(path: impl AsRef<Path>, rows: &[Vec<u32>]) -> Result<()> {
    Ok(fs::write(path, encode_ivecs(rows))?)
}
