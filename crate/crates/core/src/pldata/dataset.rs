use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::numkit::Matrix;
use crate::{Error, Result};

/// Features plus binary candidate-label indicators, one row per instance.
///
/// Every candidate row has at least one set bit, and when ground truth is
/// known the true label is always among the candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PlDataset {
    features: Matrix,
    candidates: Matrix,
    true_labels: Option<Vec<usize>>,
    class_names: Vec<String>,
    name: String,
}

impl PlDataset {
    pub fn new(
        name: impl Into<String>,
        features: Matrix,
        candidates: Matrix,
        true_labels: Option<Vec<usize>>,
        class_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = features.rows();
        let l = candidates.cols();
        if candidates.rows() != n {
            return Err(Error::InvalidData(format!(
                "{} feature rows but {} candidate rows",
                n,
                candidates.rows()
            )));
        }
        if l == 0 {
            return Err(Error::InvalidData(
                "dataset needs at least one class".into(),
            ));
        }
        features.ensure_finite("dataset features")?;
        for (i, row) in candidates.iter_rows().enumerate() {
            if row.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::InvalidData(format!(
                    "candidate row {i} is not binary"
                )));
            }
            if !row.contains(&1.0) {
                return Err(Error::InvalidData(format!("candidate row {i} is empty")));
            }
        }
        if let Some(t) = &true_labels {
            if t.len() != n {
                return Err(Error::InvalidData(format!(
                    "{} true labels for {} instances",
                    t.len(),
                    n
                )));
            }
            for (i, &c) in t.iter().enumerate() {
                if c >= l {
                    return Err(Error::InvalidData(format!(
                        "true label {c} of row {i} is out of range"
                    )));
                }
                if candidates[(i, c)] != 1.0 {
                    return Err(Error::InvalidData(format!(
                        "true label {c} of row {i} is not among its candidates"
                    )));
                }
            }
        }
        let class_names = match class_names {
            Some(names) if names.len() != l => {
                return Err(Error::InvalidData(format!(
                    "{} class names for {} classes",
                    names.len(),
                    l
                )))
            }
            Some(names) => names,
            None => (0..l).map(|c| c.to_string()).collect(),
        };
        Ok(PlDataset {
            features,
            candidates,
            true_labels,
            class_names,
            name: name.into(),
        })
    }

    /// A fully supervised set: each candidate row holds only its true label.
    pub fn supervised(
        name: impl Into<String>,
        features: Matrix,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let mut candidates = Matrix::zeros(features.rows(), num_classes);
        for (i, &c) in labels.iter().enumerate() {
            if c >= num_classes || i >= features.rows() {
                return Err(Error::InvalidData(format!(
                    "label {c} of row {i} is out of range"
                )));
            }
            candidates[(i, c)] = 1.0;
        }
        PlDataset::new(name, features, candidates, Some(labels), None)
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.candidates.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn candidates(&self) -> &Matrix {
        &self.candidates
    }

    pub fn true_labels(&self) -> Option<&[usize]> {
        self.true_labels.as_deref()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn candidate_set(&self, i: usize) -> Vec<usize> {
        self.candidates
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1.0)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn mean_candidate_size(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.candidates.as_slice().iter().sum::<f64>() / self.len() as f64
    }

    pub fn is_normalized(&self) -> bool {
        self.features
            .as_slice()
            .iter()
            .all(|v| (-1.0..=1.0).contains(v))
    }

    /// Rows `indices` (in that order) as a new dataset.
    pub fn subset(&self, indices: &[usize]) -> PlDataset {
        PlDataset {
            features: self.features.select_rows(indices),
            candidates: self.candidates.select_rows(indices),
            true_labels: self
                .true_labels
                .as_ref()
                .map(|t| indices.iter().map(|&i| t[i]).collect()),
            class_names: self.class_names.clone(),
            name: self.name.clone(),
        }
    }

    pub fn with_features(&self, features: Matrix) -> Result<PlDataset> {
        features.ensure_shape("PlDataset::with_features", self.len(), self.dim())?;
        features.ensure_finite("dataset features")?;
        Ok(PlDataset {
            features,
            ..self.clone()
        })
    }

    pub(crate) fn with_candidates(&self, candidates: Matrix, name: String) -> Result<PlDataset> {
        PlDataset::new(
            name,
            self.features.clone(),
            candidates,
            self.true_labels.clone(),
            Some(self.class_names.clone()),
        )
    }

    pub fn renamed(mut self, name: impl Into<String>) -> PlDataset {
        self.name = name.into();
        self
    }
}
