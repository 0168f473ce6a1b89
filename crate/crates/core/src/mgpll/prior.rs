use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::numkit::Matrix;
use crate::rng::{rng_for, RngState};
use crate::{Error, Result};

/// Draws generator noise (uniform on `[-1,1]^noise_dim`) and one-hot labels
/// (multinomial over the classes). Owns its RNG.
#[derive(Debug, Clone)]
pub struct PriorSampler {
    noise_dim: usize,
    weights: Vec<f64>,
    rng: ChaCha8Rng,
}

impl PriorSampler {
    /// Uniform label weights.
    pub fn new(noise_dim: usize, num_classes: usize, seed: u64, stream: u64) -> Self {
        PriorSampler {
            noise_dim,
            weights: alloc::vec![1.0 / num_classes as f64; num_classes],
            rng: rng_for(seed, stream),
        }
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn num_classes(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Replaces the label weights; they must be nonnegative with a positive
    /// total and are renormalized to sum to one.
    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.weights.len() {
            return Err(Error::InvalidConfig(format!(
                "{} label weights for {} classes",
                weights.len(),
                self.weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidConfig(
                "label weights must be finite and >= 0".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidConfig("label weights sum to zero".into()));
        }
        self.weights = weights.iter().map(|w| w / total).collect();
        Ok(())
    }

    pub fn sample_noise(&mut self, m: usize) -> Matrix {
        let data = (0..m * self.noise_dim)
            .map(|_| self.rng.gen_range(-1.0..=1.0))
            .collect();
        Matrix::from_vec(m, self.noise_dim, data).expect("sized")
    }

    /// `m` one-hot rows and their class indices.
    pub fn sample_labels(&mut self, m: usize) -> (Matrix, Vec<usize>) {
        let l = self.weights.len();
        let mut z = Matrix::zeros(m, l);
        let mut classes = Vec::with_capacity(m);
        for i in 0..m {
            let u: f64 = self.rng.gen();
            let mut acc = 0.0;
            let mut pick = l - 1;
            for (c, w) in self.weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = c;
                    break;
                }
            }
            // never pick a zero-weight tail class through round-off
            while self.weights[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            z[(i, pick)] = 1.0;
            classes.push(pick);
        }
        (z, classes)
    }

    pub fn rng_state(&self) -> RngState {
        RngState::capture(&self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_in_range_and_deterministic() {
        let mut a = PriorSampler::new(4, 3, 9, 5);
        let mut b = PriorSampler::new(4, 3, 9, 5);
        let na = a.sample_noise(10);
        assert_eq!(na, b.sample_noise(10));
        assert!(na.as_slice().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn labels_follow_weights() {
        let mut s = PriorSampler::new(1, 3, 1, 5);
        s.set_weights(&[0.0, 3.0, 1.0]).unwrap();
        assert_eq!(s.weights(), &[0.0, 0.75, 0.25]);
        let (z, classes) = s.sample_labels(4000);
        assert!(classes.iter().all(|&c| c != 0));
        let ones = classes.iter().filter(|&&c| c == 1).count() as f64 / 4000.0;
        assert!((ones - 0.75).abs() < 3.0 * (0.75f64 * 0.25 / 4000.0).sqrt());
        for r in z.iter_rows() {
            assert_eq!(r.iter().sum::<f64>(), 1.0);
        }
        assert!(s.set_weights(&[0.0, 0.0, 0.0]).is_err());
        assert!(s.set_weights(&[1.0, -1.0, 1.0]).is_err());
    }
}
