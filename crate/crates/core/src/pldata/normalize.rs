use alloc::vec::Vec;

use super::PlDataset;
use crate::numkit::Matrix;
use crate::Result;

/// Per-column min-max map onto `[-1, 1]`, fitted on one split and reusable on
/// another.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Normalizer {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Normalizer {
    pub fn fit(features: &Matrix) -> Self {
        let cols = features.cols();
        let mut min = alloc::vec![f64::INFINITY; cols];
        let mut max = alloc::vec![f64::NEG_INFINITY; cols];
        for r in features.iter_rows() {
            for j in 0..cols {
                min[j] = min[j].min(r[j]);
                max[j] = max[j].max(r[j]);
            }
        }
        Normalizer { min, max }
    }

    /// Constant columns map to 0. Values outside the fitted range are clamped.
    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        features.ensure_shape("Normalizer::apply", features.rows(), self.min.len())?;
        let mut out = features.clone();
        for r in 0..out.rows() {
            let row = out.row_mut(r);
            for (j, v) in row.iter_mut().enumerate() {
                let (lo, hi) = (self.min[j], self.max[j]);
                *v = if lo == -1.0 && hi == 1.0 {
                    v.clamp(-1.0, 1.0)
                } else if hi > lo {
                    ((*v - lo) / (hi - lo) * 2.0 - 1.0).clamp(-1.0, 1.0)
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }
}

/// Fits a [`Normalizer`] on `ds` and applies it.
pub fn normalize_features(ds: &PlDataset) -> Result<(PlDataset, Normalizer)> {
    let norm = Normalizer::fit(ds.features());
    let features = norm.apply(ds.features())?;
    Ok((ds.with_features(features)?, norm))
}
