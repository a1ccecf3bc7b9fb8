//! Distance kernels.
//!
//! Every metric is expressed as a distance where smaller means closer.
//! Cosine is `1 - cos(a, b)`, so it lies in `[0, 2]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Cosine,
}

impl Metric {
    pub(crate) fn code(self) -> u32 {
        match self {
            Metric::Euclidean => 0,
            Metric::Cosine => 1,
        }
    }

    pub(crate) fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(Metric::Euclidean),
            1 => Some(Metric::Cosine),
            _ => None,
        }
    }

    /// Distance without validation. Callers guarantee equal lengths and,
    /// for cosine, non-zero inputs.
    #[inline]
    pub fn eval(self, a: &[f32], b: &[f32]) -> f32 {
        match self {
            Metric::Euclidean => l2_squared(a, b).sqrt(),
            Metric::Cosine => cosine_distance(a, b),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "cosine" | "angular" => Ok(Metric::Cosine),
            other => Err(Error::param(format!("unknown metric '{other}'"))),
        }
    }
}

/// Checked distance between two vectors.
pub fn distance(metric: Metric, a: &[f32], b: &[f32]) -> Result<f32> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    if metric == Metric::Cosine && (is_zero(a) || is_zero(b)) {
        return Err(Error::MetricDomain(
            "cosine distance is undefined for a zero vector".into(),
        ));
    }
    Ok(metric.eval(a, b))
}

pub(crate) fn is_zero(v: &[f32]) -> bool {
    v.iter().all(|&x| x == 0.0)
}

const LANES: usize = 8;

#[inline]
pub fn l2_squared(a: &[f32], b: &[f32]) -> f32 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f32; LANES];
    let chunks_a = a.chunks_exact(LANES);
    let chunks_b = b.chunks_exact(LANES);
    let tail_a = chunks_a.remainder();
    let tail_b = chunks_b.remainder();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for i in 0..LANES {
            let d = ca[i] - cb[i];
            acc[i] += d * d;
        }
    }
    let mut sum: f32 = acc.iter().sum();
    for (x, y) in tail_a.iter().zip(tail_b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

#[inline]
fn cosine_distance(a: &[f32], b: &[f32]) -> f32 {
    let mut dot = [0.0f32; LANES];
    let mut na = [0.0f32; LANES];
    let mut nb = [0.0f32; LANES];
    let chunks_a = a.chunks_exact(LANES);
    let chunks_b = b.chunks_exact(LANES);
    let tail_a = chunks_a.remainder();
    let tail_b = chunks_b.remainder();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for i in 0..LANES {
            dot[i] += ca[i] * cb[i];
            na[i] += ca[i] * ca[i];
            nb[i] += cb[i] * cb[i];
        }
    }
    let (mut d, mut x, mut y): (f32, f32, f32) =
        (dot.iter().sum(), na.iter().sum(), nb.iter().sum());
    for (p, q) in tail_a.iter().zip(tail_b) {
        d += p * q;
        x += p * p;
        y += q * q;
    }
    // x * y and y * x are bitwise equal, which keeps the result symmetric.
    let sim = d / (x.sqrt() * y.sqrt());
    (1.0 - sim).clamp(0.0, 2.0)
}
