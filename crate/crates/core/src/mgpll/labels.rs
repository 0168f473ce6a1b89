//! Candidate-label algebra.
//!
//! `denoise(y, n) = max(y − n, 0)` strips a (possibly soft) noise vector from a
//! candidate vector; `augment(z, n) = min(z + n, 1)` adds one.

use alloc::vec::Vec;

use crate::numkit::Matrix;
use crate::{Error, Result};

/// A vector over the classes with every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLabelVector(Vec<f64>);

impl CandidateLabelVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidData(
                "label vector entries must lie in [0,1]".into(),
            ));
        }
        Ok(CandidateLabelVector(values))
    }

    pub fn one_hot(len: usize, hot: usize) -> Self {
        let mut v = alloc::vec![0.0; len];
        v[hot] = 1.0;
        CandidateLabelVector(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn set_bits(&self) -> usize {
        self.0.iter().filter(|&&v| v == 1.0).count()
    }
}

fn check_len(a: &CandidateLabelVector, b: &CandidateLabelVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            context: "label algebra",
            expected: (1, a.len()),
            actual: (1, b.len()),
        });
    }
    Ok(())
}

pub fn denoise(
    y: &CandidateLabelVector,
    noise: &CandidateLabelVector,
) -> Result<CandidateLabelVector> {
    check_len(y, noise)?;
    Ok(CandidateLabelVector(
        y.0.iter()
            .zip(&noise.0)
            .map(|(a, b)| (a - b).max(0.0))
            .collect(),
    ))
}

pub fn augment(
    z: &CandidateLabelVector,
    noise: &CandidateLabelVector,
) -> Result<CandidateLabelVector> {
    check_len(z, noise)?;
    Ok(CandidateLabelVector(
        z.0.iter()
            .zip(&noise.0)
            .map(|(a, b)| (a + b).min(1.0))
            .collect(),
    ))
}

/// Row-wise denoise plus the pass-through mask `y − n > 0`, which is where
/// `∂out/∂n = −1` (zero elsewhere).
pub fn denoise_batch(y: &Matrix, noise: &Matrix) -> Result<(Matrix, Matrix)> {
    let out = y.zip_map(noise, |a, b| (a - b).max(0.0))?;
    let mask = y.zip_map(noise, |a, b| if a - b > 0.0 { 1.0 } else { 0.0 })?;
    Ok((out, mask))
}

/// Row-wise augment plus the pass-through mask `z + n < 1`, which is where
/// `∂out/∂n = 1` (zero elsewhere).
pub fn augment_batch(z: &Matrix, noise: &Matrix) -> Result<(Matrix, Matrix)> {
    let out = z.zip_map(noise, |a, b| (a + b).min(1.0))?;
    let mask = z.zip_map(noise, |a, b| if a + b < 1.0 { 1.0 } else { 0.0 })?;
    Ok((out, mask))
}
