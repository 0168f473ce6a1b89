use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::metrics::Metric;
use super::ttest::{paired_t_test, TTest, Verdict};
use crate::{Error, Result};

/// Per-fold scores of one method on one dataset under one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodScores {
    pub dataset: String,
    pub metric: Metric,
    pub method: String,
    pub scores: Vec<f64>,
}

impl MethodScores {
    pub fn mean(&self) -> f64 {
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }

    /// Sample standard deviation (n − 1 denominator); 0 for a single score.
    pub fn std(&self) -> f64 {
        let n = self.scores.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.scores.iter().map(|s| (s - m) * (s - m)).sum();
        libm::sqrt(ss / (n as f64 - 1.0))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub win: usize,
    pub tie: usize,
    pub loss: usize,
}

impl Tally {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Win => self.win += 1,
            Verdict::Tie => self.tie += 1,
            Verdict::Loss => self.loss += 1,
        }
    }
}

/// Results of several methods, compared pairwise against a reference method.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    /// Method every other method is tested against.
    pub reference: Option<String>,
    pub rows: Vec<MethodScores>,
    /// Free-form run metadata (seeds, configs, input hashes), in order.
    pub metadata: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn new(reference: impl Into<String>) -> Self {
        ExperimentReport {
            reference: Some(reference.into()),
            ..Default::default()
        }
    }

    /// Adds a row. Rows sharing a dataset and metric must have the same fold
    /// count.
    pub fn push(&mut self, row: MethodScores) -> Result<()> {
        if row.scores.is_empty() {
            return Err(Error::InvalidData(
                "a report row needs at least one score".into(),
            ));
        }
        if let Some(other) = self
            .rows
            .iter()
            .find(|r| r.dataset == row.dataset && r.metric == row.metric)
        {
            if other.scores.len() != row.scores.len() {
                return Err(Error::InvalidData(format!(
                    "{} on {} has {} folds, {} has {}",
                    row.method,
                    row.dataset,
                    row.scores.len(),
                    other.method,
                    other.scores.len()
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    /// Distinct (dataset, metric) pairs in first-seen order.
    pub fn groups(&self) -> Vec<(String, Metric)> {
        let mut out: Vec<(String, Metric)> = Vec::new();
        for r in &self.rows {
            if !out.iter().any(|(d, m)| *d == r.dataset && *m == r.metric) {
                out.push((r.dataset.clone(), r.metric));
            }
        }
        out
    }

    pub fn find(&self, dataset: &str, metric: Metric, method: &str) -> Option<&MethodScores> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && r.metric == metric && r.method == method)
    }

    /// Reference versus `row`'s method on `row`'s dataset and metric, from the
    /// reference's point of view. `None` for the reference itself or when the
    /// reference has no row there, or with fewer than two folds.
    pub fn comparison(&self, row: &MethodScores) -> Option<TTest> {
        let reference = self.reference.as_deref()?;
        if row.method == reference {
            return None;
        }
        let base = self.find(&row.dataset, row.metric, reference)?;
        paired_t_test(&base.scores, &row.scores, 0.05).ok()
    }

    /// Win/tie/loss of the reference against `method` over every group.
    pub fn tally(&self, method: &str) -> Tally {
        let mut t = Tally::default();
        for r in self.rows.iter().filter(|r| r.method == method) {
            if let Some(c) = self.comparison(r) {
                t.add(c.verdict);
            }
        }
        t
    }

    /// Methods in first-seen order.
    pub fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn row(method: &str, scores: Vec<f64>) -> MethodScores {
        MethodScores {
            dataset: "d".into(),
            metric: Metric::Accuracy,
            method: method.into(),
            scores,
        }
    }

    #[test]
    fn std_uses_sample_denominator() {
        let r = row("a", vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(r.mean(), 2.5);
        assert!((r.std() - 1.2909944487358056).abs() < 1e-15);
    }

    #[test]
    fn fold_counts_must_agree() {
        let mut rep = ExperimentReport::new("a");
        rep.push(row("a", vec![0.5, 0.6])).unwrap();
        assert!(rep.push(row("b", vec![0.5])).is_err());
    }

    #[test]
    fn tallies_from_reference_view() {
        let mut rep = ExperimentReport::new("a");
        rep.push(row("a", vec![0.9, 0.91, 0.92, 0.9])).unwrap();
        rep.push(row("b", vec![0.5, 0.52, 0.49, 0.5])).unwrap();
        rep.push(row("c", vec![0.9, 0.91, 0.92, 0.9])).unwrap();
        assert_eq!(
            rep.tally("b"),
            Tally {
                win: 1,
                tie: 0,
                loss: 0
            }
        );
        assert_eq!(
            rep.tally("c"),
            Tally {
                win: 0,
                tie: 1,
                loss: 0
            }
        );
        assert!(rep.comparison(&rep.rows[0]).is_none());
    }
}
