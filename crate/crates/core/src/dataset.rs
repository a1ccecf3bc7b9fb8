use crate::error::{Error, Result};
use crate::metric::{is_zero, Metric};

/// Read access to a set of vectors addressed by dense ids.
///
/// Search and construction routines are generic over this so that callers
/// can wrap a dataset (for instance to count distance evaluations).
pub trait PointSet {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dim(&self) -> usize;

    fn vector(&self, id: u32) -> &[f32];

    fn distance_to(&self, query: &[f32], id: u32) -> f32;

    fn distance_between(&self, a: u32, b: u32) -> f32 {
        self.distance_to(self.vector(a), b)
    }
}

/// Dense row-major float vectors sharing one dimension and metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    metric: Metric,
    data: Vec<f32>,
}

impl Dataset {
    /// An empty dataset. A `dim` of zero means "set by the first push".
    pub fn new(dim: usize, metric: Metric) -> Self {
        Self {
            dim,
            metric,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, metric: Metric, n: usize) -> Self {
        Self {
            dim,
            metric,
            data: Vec::with_capacity(dim * n),
        }
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R], metric: Metric) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut ds = Self::with_capacity(dim, metric, rows.len());
        for r in rows {
            ds.push(r.as_ref())?;
        }
        Ok(ds)
    }

    /// Builds a dataset from a flat buffer of `n * dim` floats.
    pub fn from_flat(dim: usize, metric: Metric, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            if data.is_empty() {
                return Ok(Self::new(0, metric));
            }
            return Err(Error::param("dimension must be positive"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: data.len() % dim,
            });
        }
        for row in data.chunks_exact(dim) {
            validate_row(row, metric)?;
        }
        Ok(Self { dim, metric, data })
    }

    pub fn push(&mut self, v: &[f32]) -> Result<u32> {
        if self.dim == 0 && self.data.is_empty() {
            if v.is_empty() {
                return Err(Error::param("dimension must be positive"));
            }
            self.dim = v.len();
        }
        if v.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: v.len(),
            });
        }
        validate_row(v, self.metric)?;
        let id = self.len();
        if id >= u32::MAX as usize {
            return Err(Error::param("dataset exceeds u32 id space"));
        }
        self.data.extend_from_slice(v);
        Ok(id as u32)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn as_flat(&self) -> &[f32] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f32]> + '_ {
        // chunks_exact panics on a zero chunk size.
        self.data.chunks_exact(self.dim.max(1))
    }

    /// Copies the listed rows into a new dataset, in order.
    pub fn select(&self, ids: &[u32]) -> Dataset {
        let mut out = Dataset::with_capacity(self.dim, self.metric, ids.len());
        for &id in ids {
            out.data.extend_from_slice(self.vector(id));
        }
        out
    }

    /// Splits off rows `[from, to)` into a new dataset.
    pub fn slice(&self, from: usize, to: usize) -> Dataset {
        Dataset {
            dim: self.dim,
            metric: self.metric,
            data: self.data[from * self.dim..to * self.dim].to_vec(),
        }
    }
}

fn validate_row(v: &[f32], metric: Metric) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("vector contains a non-finite component"));
    }
    if metric == Metric::Cosine && is_zero(v) {
        return Err(Error::MetricDomain(
            "zero vector in a cosine dataset".into(),
        ));
    }
    Ok(())
}

impl PointSet for Dataset {
    #[inline]
    fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn vector(&self, id: u32) -> &[f32] {
        let start = id as usize * self.dim;
        &self.data[start..start + self.dim]
    }

    #[inline]
    fn distance_to(&self, query: &[f32], id: u32) -> f32 {
        self.metric.eval(query, self.vector(id))
    }
}

impl<P: PointSet + ?Sized> PointSet for &P {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn vector(&self, id: u32) -> &[f32] {
        (**self).vector(id)
    }
    fn distance_to(&self, query: &[f32], id: u32) -> f32 {
        (**self).distance_to(query, id)
    }
    fn distance_between(&self, a: u32, b: u32) -> f32 {
        (**self).distance_between(a, b)
    }
}
