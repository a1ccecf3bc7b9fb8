//! Seeded synthetic datasets for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::metric::Metric;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Independent coordinates uniform in `[0, 1)`.
    UniformCube,
    /// `clusters` isotropic Gaussians (sigma 0.1) around centers drawn
    /// uniformly from the unit cube; each point picks a center uniformly.
    GaussianMixture { clusters: usize },
}

/// Generates `n` vectors of dimension `dim`. The same seed always gives the
/// same dataset. Cosine datasets never contain a zero vector: a row that
/// comes out all-zero (practically impossible) is redrawn.
pub fn gen_synthetic(n: usize, dim: usize, seed: u64, distribution: Distribution, metric: Metric) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = Dataset::with_capacity(dim, metric, n);
    let mut row = vec![0.0f32; dim];
    let centers: Vec<Vec<f32>> = match distribution {
        Distribution::UniformCube => Vec::new(),
        Distribution::GaussianMixture { clusters } => (0..clusters.max(1))
            .map(|_| (0..dim).map(|_| rng.random::<f32>()).collect())
            .collect(),
    };
    let noise = Normal::new(0.0f32, 0.1).unwrap();
    if dim == 0 {
        return ds;
    }
    let mut made = 0;
    while made < n {
        if centers.is_empty() {
            row.iter_mut().for_each(|x| *x = rng.random::<f32>());
        } else {
            let c = &centers[rng.random_range(0..centers.len())];
            for (x, &m) in row.iter_mut().zip(c) {
                *x = m + noise.sample(&mut rng);
            }
        }
        // Only fails for an all-zero cosine row; draw again.
        if ds.push(&row).is_ok() {
            made += 1;
        }
    }
    ds
}
