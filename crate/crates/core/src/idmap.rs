//! Local-to-global vertex id mapping for merges.
//!
//! Each source index owns a disjoint block of global ids starting at its
//! offset. Valid local ids are numbered consecutively inside that block in
//! ascending local order; invalid ones (deleted or duplicated elsewhere) map
//! to nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INVALID: u32 = u32::MAX;

/// Serializable description of an id map: one entry per source index.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdMapSpec {
    pub sources: Vec<SourceSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    /// First global id of this source. Defaults to the running total of
    /// valid vertices in the preceding sources.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<u32>,
    /// Individual invalid local ids.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub invalid: Vec<u32>,
    /// Half-open ranges `[start, end)` of invalid local ids.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub invalid_ranges: Vec<(u32, u32)>,
    /// Marks the whole source invalid.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub all_invalid: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdMap {
    offsets: Vec<u32>,
    /// Per source, local id -> global id or `INVALID`.
    table: Vec<Vec<u32>>,
    /// Global id -> (source, local id).
    inverse: Vec<(u32, u32)>,
}

impl IdMap {
    /// All vertices valid, sources laid out back to back.
    pub fn sequential(sizes: &[usize]) -> Self {
        Self::from_spec(
            &IdMapSpec {
                sources: vec![SourceSpec::default(); sizes.len()],
            },
            sizes,
        )
        .expect("sequential layout is always valid")
    }

    /// Sources laid out back to back with the given local ids dropped.
    pub fn with_invalid(sizes: &[usize], invalid: &[Vec<u32>]) -> Result<Self> {
        let sources = sizes
            .iter()
            .enumerate()
            .map(|(i, _)| SourceSpec {
                invalid: invalid.get(i).cloned().unwrap_or_default(),
                ..SourceSpec::default()
            })
            .collect();
        Self::from_spec(&IdMapSpec { sources }, sizes)
    }

    /// Builds the map and checks that valid global ids are unique and cover
    /// exactly `[0, total_valid)`.
    pub fn from_spec(spec: &IdMapSpec, sizes: &[usize]) -> Result<Self> {
        if spec.sources.len() != sizes.len() {
            return Err(Error::param(format!(
                "id map describes {} sources but {} were given",
                spec.sources.len(),
                sizes.len()
            )));
        }
        let mut table = Vec::with_capacity(sizes.len());
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut running: u64 = 0;
        for (src, (s, &n)) in spec.sources.iter().zip(sizes).enumerate() {
            let mut valid = vec![!s.all_invalid; n];
            for &id in &s.invalid {
                if id as usize >= n {
                    return Err(Error::Id { id: id as u64, n });
                }
                valid[id as usize] = false;
            }
            for &(a, b) in &s.invalid_ranges {
                if a > b || b as usize > n {
                    return Err(Error::param(format!(
                        "invalid range [{a}, {b}) out of bounds for source {src} of size {n}"
                    )));
                }
                valid[a as usize..b as usize].fill(false);
            }
            let offset = s.offset.map_or(running, u64::from);
            let mut next = offset;
            let mut row = Vec::with_capacity(n);
            for ok in valid {
                if ok {
                    if next >= INVALID as u64 {
                        return Err(Error::param("global id space exceeds u32"));
                    }
                    row.push(next as u32);
                    next += 1;
                } else {
                    row.push(INVALID);
                }
            }
            running = running.max(next);
            offsets.push(offset as u32);
            table.push(row);
        }
        let total = table
            .iter()
            .map(|r| r.iter().filter(|&&g| g != INVALID).count())
            .sum::<usize>();
        let mut inverse = vec![(INVALID, INVALID); total];
        for (src, row) in table.iter().enumerate() {
            for (local, &g) in row.iter().enumerate() {
                if g == INVALID {
                    continue;
                }
                let slot = inverse.get_mut(g as usize).ok_or_else(|| {
                    Error::param(format!(
                        "global id {g} outside [0, {total}); offsets leave gaps"
                    ))
                })?;
                if slot.0 != INVALID {
                    return Err(Error::param(format!("global id {g} assigned twice")));
                }
                *slot = (src as u32, local as u32);
            }
        }
        Ok(Self {
            offsets,
            table,
            inverse,
        })
    }

    pub fn num_sources(&self) -> usize {
        self.table.len()
    }

    pub fn source_len(&self, source: usize) -> usize {
        self.table[source].len()
    }

    pub fn offset(&self, source: usize) -> u32 {
        self.offsets[source]
    }

    /// `φ(source, local)`: the global id, or `None` if the vertex is dropped.
    #[inline]
    pub fn map(&self, source: usize, local: u32) -> Option<u32> {
        match self.table[source].get(local as usize) {
            Some(&g) if g != INVALID => Some(g),
            _ => None,
        }
    }

    pub fn is_valid(&self, source: usize, local: u32) -> bool {
        self.map(source, local).is_some()
    }

    pub fn total_valid(&self) -> usize {
        self.inverse.len()
    }

    pub fn valid_in_source(&self, source: usize) -> usize {
        self.table[source].iter().filter(|&&g| g != INVALID).count()
    }

    /// `(source, local)` for a global id.
    pub fn inverse(&self, global: u32) -> (usize, u32) {
        let (s, l) = self.inverse[global as usize];
        (s as usize, l)
    }

    /// Source index of every global id, in global order.
    pub fn origins(&self) -> Vec<u32> {
        self.inverse.iter().map(|&(s, _)| s).collect()
    }
}
