//! Seeded Gaussian-blob datasets: clean, singly-labeled stand-ins for small
//! real benchmarks.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::PlDataset;
use crate::numkit::Matrix;
use crate::rng::{rng_for, stream};
use crate::{Error, Result};

/// Class sizes of the 336-instance, 8-class *ecoli* protein-localization
/// benchmark.
pub const ECOLI_CLASS_COUNTS: [usize; 8] = [143, 77, 52, 35, 20, 5, 2, 2];

#[derive(Debug, Clone, PartialEq)]
pub struct BlobConfig {
    pub class_counts: Vec<usize>,
    pub dim: usize,
    /// Class centers are uniform on `[-spread, spread]^dim`.
    pub spread: f64,
    /// Per-coordinate standard deviation around each center.
    pub noise: f64,
    pub seed: u64,
}

impl BlobConfig {
    /// Seven features, eight classes, ecoli class sizes.
    pub fn ecoli_like(seed: u64) -> Self {
        BlobConfig {
            class_counts: ECOLI_CLASS_COUNTS.to_vec(),
            dim: 7,
            spread: 1.0,
            noise: 0.35,
            seed,
        }
    }
}

/// Instances are emitted in a seeded random order.
pub fn gaussian_blobs(name: &str, cfg: &BlobConfig) -> Result<PlDataset> {
    let l = cfg.class_counts.len();
    if l == 0 || cfg.dim == 0 || cfg.class_counts.contains(&0) {
        return Err(Error::InvalidConfig(
            "blobs need at least one class, every class nonempty, and dim >= 1".into(),
        ));
    }
    if !(cfg.spread >= 0.0 && cfg.noise >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "spread and noise must be >= 0, got {} and {}",
            cfg.spread, cfg.noise
        )));
    }
    let mut rng = rng_for(cfg.seed, stream::BLOBS);
    let centers: Vec<Vec<f64>> = (0..l)
        .map(|_| {
            (0..cfg.dim)
                .map(|_| rng.gen_range(-1.0..=1.0) * cfg.spread)
                .collect()
        })
        .collect();
    let mut labels: Vec<usize> = cfg
        .class_counts
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| core::iter::repeat_n(c, k))
        .collect();
    labels.shuffle(&mut rng);
    let mut data = Vec::with_capacity(labels.len() * cfg.dim);
    for &c in &labels {
        for &mu in &centers[c] {
            let z: f64 = rng.sample(StandardNormal);
            data.push(mu + cfg.noise * z);
        }
    }
    let n = labels.len();
    PlDataset::supervised(name, Matrix::from_vec(n, cfg.dim, data)?, labels, l)
}
