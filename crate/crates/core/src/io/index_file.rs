//! Binary index files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        4 bytes  "FGIM"
//! version      u32      1
//! metric       u32      0 = euclidean, 1 = cosine
//! variant      u32      0 = flat, 1 = hierarchical
//! dim          u32
//! n            u32
//! max_degree   u32      base-layer outdegree bound
//! upper_degree u32      upper-layer outdegree bound (= max_degree when flat)
//! enterpoint   u32      u32::MAX when the graph is empty
//! levels       n x u8   hierarchical only
//! adjacency    for each vertex v, for each layer 0..=level(v):
//!                u32 length, then that many u32 neighbor ids
//! ```
//!
//! Nothing may follow the last list.

use std::fs;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::graph::{Hierarchy, ProximityGraph};
use crate::metric::Metric;

pub const MAGIC: &[u8; 4] = b"FGIM";
pub const FORMAT_VERSION: u32 = 1;

const FLAT: u32 = 0;
const HIERARCHICAL: u32 = 1;
const NO_ENTERPOINT: u32 = u32::MAX;

pub fn encode_index(graph: &ProximityGraph) -> Vec<u8> {
    let n = graph.num_vertices();
    let mut out = Vec::with_capacity(36 + n * (4 + 4 * graph.max_degree()));
    out.extend_from_slice(MAGIC);
    let header = [
        FORMAT_VERSION,
        graph.metric().code(),
        if graph.is_hierarchical() { HIERARCHICAL } else { FLAT },
        graph.dim() as u32,
        n as u32,
        graph.max_degree() as u32,
        graph.upper_degree() as u32,
        graph.enterpoint().unwrap_or(NO_ENTERPOINT),
    ];
    for h in header {
        out.write_u32::<LittleEndian>(h).unwrap();
    }
    if let Some(h) = graph.hierarchy() {
        out.extend_from_slice(h.levels());
    }
    for v in 0..n as u32 {
        for level in 0..=graph.level(v) {
            let list = graph.layer_neighbors(v, level);
            out.write_u32::<LittleEndian>(list.len() as u32).unwrap();
            for &w in list {
                out.write_u32::<LittleEndian>(w).unwrap();
            }
        }
    }
    out
}

fn truncated(_: std::io::Error) -> Error {
    Error::format("index file is truncated")
}

pub fn decode_index(bytes: &[u8]) -> Result<ProximityGraph> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::format("not an index file (bad magic)"));
    }
    let mut r = &bytes[4..];
    let mut next = || r.read_u32::<LittleEndian>().map_err(truncated);
    let version = next()?;
    if version != FORMAT_VERSION {
        return Err(Error::format(format!("unsupported index version {version}")));
    }
    let metric = Metric::from_code(next()?).ok_or_else(|| Error::format("unknown metric code"))?;
    let variant = next()?;
    let dim = next()? as usize;
    let n = next()? as usize;
    let max_degree = next()? as usize;
    let upper_degree = next()? as usize;
    let ep = next()?;
    let enterpoint = (ep != NO_ENTERPOINT).then_some(ep);

    let levels: Option<Vec<u8>> = match variant {
        FLAT => None,
        HIERARCHICAL => {
            if r.len() < n {
                return Err(Error::format("index file is truncated"));
            }
            let (lv, rest) = r.split_at(n);
            r = rest;
            Some(lv.to_vec())
        }
        other => return Err(Error::format(format!("unknown variant tag {other}"))),
    };

    let read_list = |r: &mut &[u8]| -> Result<Vec<u32>> {
        let len = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
        if r.len() / 4 < len {
            return Err(Error::format("index file is truncated"));
        }
        let mut list = vec![0u32; len];
        r.read_u32_into::<LittleEndian>(&mut list).map_err(truncated)?;
        Ok(list)
    };

    // Cap preallocation by what the payload could possibly hold.
    let mut adjacency = Vec::with_capacity(n.min(r.len() / 4));
    let mut upper = Vec::with_capacity(if levels.is_some() { n.min(r.len() / 4) } else { 0 });
    for v in 0..n {
        adjacency.push(read_list(&mut r)?);
        if let Some(lv) = &levels {
            let mut layers = Vec::with_capacity(lv[v] as usize);
            for _ in 0..lv[v] {
                layers.push(read_list(&mut r)?);
            }
            upper.push(layers);
        }
    }
    if !r.is_empty() {
        return Err(Error::format(format!("{} trailing bytes after index payload", r.len())));
    }
    let graph = match levels {
        None => ProximityGraph::flat(metric, dim, max_degree, adjacency, enterpoint),
        Some(lv) => ProximityGraph::hierarchical(
            metric,
            dim,
            max_degree,
            upper_degree,
            adjacency,
            Hierarchy::new(lv, upper),
            enterpoint,
        ),
    };
    graph.map_err(|e| match e {
        Error::Format(_) => e,
        other => Error::format(format!("invalid index: {other}")),
    })
}

pub fn save_index(graph: &ProximityGraph, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, encode_index(graph))?)
}

pub fn load_index(path: impl AsRef<Path>) -> Result<ProximityGraph> {
    decode_index(&fs::read(path)?)
}
