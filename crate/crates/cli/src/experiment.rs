//! Multi-method cross-validation runs assembled into reports.

use mgpll_core::eval::{cross_validate, CvConfig, ExperimentReport, Method, MethodScores};
use mgpll_core::pldata::{synthesize, PlDataset, SynthConfig};

use crate::error::Result;
use crate::report::SweepRow;

/// Cross-validates every method on `ds` with the same folds. The first
/// method is the reference for significance tests.
pub fn run_experiment(
    ds: &PlDataset,
    methods: &[Method],
    cv: &CvConfig,
) -> Result<ExperimentReport> {
    let mut report = match methods.first() {
        Some(m) => ExperimentReport::new(m.name()),
        None => ExperimentReport::default(),
    };
    for m in methods {
        let scores = cross_validate(ds, m, cv)?;
        report.push(MethodScores {
            dataset: ds.name().to_string(),
            metric: cv.metric,
            method: m.name(),
            scores,
        })?;
    }
    Ok(report)
}

/// Corrupts `clean` with coupled noise at each ε (seeded by `synth_seed`) and
/// cross-validates every method on the result.
pub fn run_sweep(
    clean: &PlDataset,
    epsilons: &[f64],
    synth_seed: u64,
    methods: &[Method],
    cv: &CvConfig,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &eps in epsilons {
        let ds = synthesize(clean, &SynthConfig::coupled(eps, synth_seed))?;
        for m in methods {
            let r = MethodScores {
                dataset: clean.name().to_string(),
                metric: cv.metric,
                method: m.name(),
                scores: cross_validate(&ds, m, cv)?,
            };
            rows.push(SweepRow {
                dataset: r.dataset.clone(),
                epsilon: eps,
                method: r.method.clone(),
                mean: r.mean(),
                std: r.std(),
            });
        }
    }
    Ok(rows)
}
