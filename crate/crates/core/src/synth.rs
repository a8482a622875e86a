//! Seeded Gaussian-mixture data for benchmarks and tests.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dissimilarity::Dataset;
use crate::error::{invalid, Result};
use crate::rng;

fn default_box() -> f64 {
    10.0
}

/// Balanced isotropic Gaussian mixture: cluster centers are uniform in
/// `[0, box_size)^dim`, object `i` belongs to cluster `i % clusters`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub clusters: usize,
    pub dim: usize,
    /// Per-coordinate standard deviation within a cluster.
    pub spread: f64,
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_box")]
    pub box_size: f64,
}

impl MixtureSpec {
    pub fn new(clusters: usize, dim: usize, spread: f64, n: usize, seed: u64) -> Self {
        MixtureSpec { clusters, dim, spread, n, seed, box_size: default_box() }
    }
}

/// Generated points and their true cluster labels.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub data: Dataset,
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
}

pub fn gaussian_mixture(spec: &MixtureSpec) -> Result<Mixture> {
    if spec.n == 0 || spec.dim == 0 || spec.clusters == 0 {
        return invalid("n, dim and clusters must be positive");
    }
    if !(spec.spread.is_finite() && spec.spread >= 0.0) {
        return invalid(format!("spread must be finite and nonnegative, got {}", spec.spread));
    }
    if !(spec.box_size.is_finite() && spec.box_size > 0.0) {
        return invalid(format!("box size must be positive, got {}", spec.box_size));
    }
    let mut rng = rng::seeded(spec.seed);
    let centers: Vec<Vec<f64>> = (0..spec.clusters)
        .map(|_| (0..spec.dim).map(|_| rng.random::<f64>() * spec.box_size).collect())
        .collect();
    let noise = Normal::new(0.0, spec.spread).expect("spread validated above");
    let mut rows = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let c = i % spec.clusters;
        rows.push(centers[c].iter().map(|&x| x + noise.sample(&mut rng)).collect());
        labels.push(c);
    }
    Ok(Mixture { data: Dataset::from_rows(rows)?, labels, centers })
}

/// Uniform data in the unit cube.
pub fn uniform(n: usize, dim: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || dim == 0 {
        return invalid("n and dim must be positive");
    }
    let mut rng = rng::seeded(seed);
    Dataset::from_rows((0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect())
}
