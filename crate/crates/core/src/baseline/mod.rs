//! PL-KNN: k nearest neighbors voting with their candidate sets.
//!
//! `score(c) = Σ_{i ∈ kNN(x)} w_i · y_i[c]` with `w_i = 1 / (dist_i + 1e-9)`
//! (or `w_i = 1`), Euclidean distance, prediction `argmax score` with the
//! lowest class index winning ties. Equidistant neighbors are ordered by
//! stored index.

use alloc::format;
use alloc::vec::Vec;

use crate::mgpll::argmax;
use crate::numkit::Matrix;
use crate::pldata::PlDataset;
use crate::{Error, Result};

pub const DEFAULT_K: usize = 10;
const DIST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    InverseDistance,
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    features: Matrix,
    candidates: Matrix,
    k: usize,
    weighting: Weighting,
}

pub fn plknn_fit(ds: &PlDataset, k: usize) -> Result<KnnModel> {
    plknn_fit_weighted(ds, k, Weighting::InverseDistance)
}

pub fn plknn_fit_weighted(ds: &PlDataset, k: usize, weighting: Weighting) -> Result<KnnModel> {
    if k < 1 || k > ds.len() {
        return Err(Error::InvalidConfig(format!(
            "k must be in [1, {}], got {k}",
            ds.len()
        )));
    }
    Ok(KnnModel {
        features: ds.features().clone(),
        candidates: ds.candidates().clone(),
        k,
        weighting,
    })
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    /// Vote totals per class for one query.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.features.cols() {
            return Err(Error::Shape {
                context: "plknn query",
                expected: (1, self.features.cols()),
                actual: (1, x.len()),
            });
        }
        let mut dist: Vec<(f64, usize)> = self
            .features
            .iter_rows()
            .enumerate()
            .map(|(i, r)| {
                let sq: f64 = r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (libm::sqrt(sq), i)
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut scores = alloc::vec![0.0; self.candidates.cols()];
        for &(d, i) in &dist[..self.k] {
            let w = match self.weighting {
                Weighting::InverseDistance => 1.0 / (d + DIST_EPS),
                Weighting::Uniform => 1.0,
            };
            for (s, &y) in scores.iter_mut().zip(self.candidates.row(i)) {
                *s += w * y;
            }
        }
        Ok(scores)
    }
}

pub fn plknn_predict(model: &KnnModel, x: &[f64]) -> Result<usize> {
    Ok(argmax(&model.scores(x)?))
}

pub fn plknn_predict_batch(model: &KnnModel, x: &Matrix) -> Result<Vec<usize>> {
    x.iter_rows().map(|r| plknn_predict(model, r)).collect()
}
