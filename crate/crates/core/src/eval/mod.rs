//! Metrics, cross-validation, significance testing and report assembly.

mod cv;
mod metrics;
mod report;
mod ttest;

pub use cv::{cross_validate, CvConfig, Method};
pub use metrics::{accuracy, mae_within, score, Metric};
pub use report::{ExperimentReport, MethodScores, Tally};
pub use ttest::{paired_t_test, t_critical, TTest, Verdict};
