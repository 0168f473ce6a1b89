use alloc::string::String;
use alloc::vec::Vec;

use super::metrics::{score, Metric};
use crate::baseline::{plknn_fit_weighted, plknn_predict_batch, Weighting};
use crate::mgpll::MgpllConfig;
use crate::pldata::{kfold_split, Normalizer, PlDataset};
use crate::rng::derive_seed;
use crate::train::{select_hyperparameters, train, AblationVariant, TrainConfig};
use crate::{Error, Result};

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Mgpll {
        variant: AblationVariant,
        train: TrainConfig,
        model: MgpllConfig,
        /// Pick alpha, beta, gamma on each training split before the final
        /// fit.
        select: bool,
    },
    PlKnn {
        k: usize,
        weighting: Weighting,
    },
    /// Always predicts one class.
    Constant(usize),
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Mgpll {
                variant: AblationVariant::Full,
                ..
            } => "mgpll".into(),
            Method::Mgpll { variant, .. } => alloc::format!("mgpll-{}", variant.name()),
            Method::PlKnn { .. } => "pl-knn".into(),
            Method::Constant(c) => alloc::format!("constant-{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub metric: Metric,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            seed: 0,
            metric: Metric::Accuracy,
        }
    }
}

/// Per-fold scores. Each fold normalizes features on its training split,
/// fits the method (MGPLL with seed `derive_seed(cv.seed, fold)`), and scores
/// predictions on the held-out split against the ground truth.
pub fn cross_validate(ds: &PlDataset, method: &Method, cv: &CvConfig) -> Result<Vec<f64>> {
    let truth = ds
        .true_labels()
        .ok_or_else(|| Error::InvalidData("cross-validation needs ground-truth labels".into()))?;
    let plan = kfold_split(ds.len(), cv.folds, cv.seed)?;
    let mut scores = Vec::with_capacity(cv.folds);
    for fold in 0..cv.folds {
        let (train_idx, test_idx) = plan.split(fold);
        let raw_train = ds.subset(&train_idx);
        let norm = Normalizer::fit(raw_train.features());
        let train_ds = raw_train.with_features(norm.apply(raw_train.features())?)?;
        let test_x = norm.apply(&ds.features().select_rows(&test_idx))?;
        let test_truth: Vec<usize> = test_idx.iter().map(|&i| truth[i]).collect();

        let preds = match method {
            Method::Mgpll {
                variant,
                train: tcfg,
                model,
                select,
            } => {
                let tcfg = TrainConfig {
                    seed: derive_seed(cv.seed, fold as u64),
                    ..tcfg.clone()
                };
                let mut mcfg = model.clone();
                if *select {
                    let s = select_hyperparameters(&train_ds, *variant, &tcfg, &mcfg)?;
                    mcfg.alpha = s.alpha;
                    mcfg.beta = s.beta;
                    mcfg.gamma = s.gamma;
                }
                let (m, _) = train(&train_ds, *variant, &tcfg, &mcfg)?;
                m.predict_labels(&test_x)?
            }
            Method::PlKnn { k, weighting } => {
                let m = plknn_fit_weighted(&train_ds, *k, *weighting)?;
                plknn_predict_batch(&m, &test_x)?
            }
            Method::Constant(c) => alloc::vec![*c; test_idx.len()],
        };
        scores.push(score(cv.metric, &preds, &test_truth, ds.class_names())?);
    }
    Ok(scores)
}
