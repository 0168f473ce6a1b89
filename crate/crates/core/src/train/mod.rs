//! The alternating critic/generator training loop.
//!
//! RNG consumption order, per run with seed `s`:
//!
//! 1. Model initialization draws from stream `INIT` of `s`, network by
//!    network (noise generator, feature generator, predictor, label critic,
//!    feature critic).
//! 2. Minibatch order draws from stream `TRAIN`: one full permutation of the
//!    training indices at the start of every epoch.
//! 3. Prior draws come from stream `PRIOR`. Every iteration draws `z`, then
//!    `eps`, then `eps_bar` (each `m` rows). With the empirical label prior
//!    and a variant that samples from it, every epoch ends with one `eps`
//!    draw of `n` rows for the prior update.
//!
//! Each critic step reuses the iteration's minibatch, `z` and `eps`.

mod select;

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::mgpll::terms::{self, ModelGrads};
use crate::mgpll::{argmax, denoise_batch, Draws, MgpllConfig, MgpllModel, Network, PriorSampler};
use crate::numkit::{clip_parameters, rmsprop_step, Direction, RmsProp};
use crate::pldata::PlDataset;
use crate::rng::{rng_for, stream};
use crate::{Error, Result};

pub use select::{select_hyperparameters, GridPoint, SearchStrategy, Selection};

/// Which loss terms a run optimizes. The classification term is always on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AblationVariant {
    Full,
    NoAdvN,
    NoAdvX,
    NoGen,
    NoAux,
    ClsOnly,
}

impl AblationVariant {
    pub const ALL: [AblationVariant; 6] = [
        AblationVariant::Full,
        AblationVariant::NoAdvN,
        AblationVariant::NoAdvX,
        AblationVariant::NoGen,
        AblationVariant::NoAux,
        AblationVariant::ClsOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AblationVariant::Full => "full",
            AblationVariant::NoAdvN => "no-adv-n",
            AblationVariant::NoAdvX => "no-adv-x",
            AblationVariant::NoGen => "no-gen",
            AblationVariant::NoAux => "no-aux",
            AblationVariant::ClsOnly => "cls-only",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        AblationVariant::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermMask {
    pub adv_n: bool,
    pub adv_x: bool,
    pub generation: bool,
    pub auxiliary: bool,
}

impl TermMask {
    pub const ALL: TermMask = TermMask {
        adv_n: true,
        adv_x: true,
        generation: true,
        auxiliary: true,
    };

    /// Active terms, counting the classification term.
    pub fn active_terms(&self) -> usize {
        1 + [self.adv_n, self.adv_x, self.generation, self.auxiliary]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    pub fn union(self, other: TermMask) -> TermMask {
        TermMask {
            adv_n: self.adv_n || other.adv_n,
            adv_x: self.adv_x || other.adv_x,
            generation: self.generation || other.generation,
            auxiliary: self.auxiliary || other.auxiliary,
        }
    }

    /// Whether any term needs fresh prior draws.
    fn needs_prior(&self) -> bool {
        self.adv_n || self.adv_x || self.auxiliary
    }
}

pub fn build_ablation_objective(variant: AblationVariant) -> TermMask {
    let all = TermMask::ALL;
    match variant {
        AblationVariant::Full => all,
        AblationVariant::NoAdvN => TermMask {
            adv_n: false,
            ..all
        },
        AblationVariant::NoAdvX => TermMask {
            adv_x: false,
            ..all
        },
        AblationVariant::NoGen => TermMask {
            generation: false,
            ..all
        },
        AblationVariant::NoAux => TermMask {
            auxiliary: false,
            ..all
        },
        AblationVariant::ClsOnly => TermMask {
            adv_n: false,
            adv_x: false,
            generation: false,
            auxiliary: false,
        },
    }
}

/// How the label prior is set during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LabelPrior {
    Uniform,
    /// Class frequencies of the denoised-label argmaxes over the training
    /// set, recomputed after every epoch. Uniform until the first update.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EarlyStop {
    pub window: usize,
    pub tolerance: f64,
}

impl Default for EarlyStop {
    fn default() -> Self {
        EarlyStop {
            window: 20,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    /// Optimizer for the noise generator, feature generator and predictor.
    pub generator_opt: RmsProp,
    /// Optimizer for both critics.
    pub critic_opt: RmsProp,
    pub critic_steps: usize,
    /// Candidate values for each of alpha, beta and gamma.
    pub grid: Vec<f64>,
    pub search: SearchStrategy,
    /// Stop once the classification loss moved less than the tolerance over
    /// the window. `None` always runs every epoch.
    pub early_stop: Option<EarlyStop>,
    pub label_prior: LabelPrior,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            epochs: 200,
            generator_opt: RmsProp::default(),
            critic_opt: RmsProp::default(),
            critic_steps: 1,
            grid: alloc::vec![0.001, 0.01, 0.1, 1.0, 10.0],
            search: SearchStrategy::CoordinateDescent,
            early_stop: Some(EarlyStop::default()),
            label_prior: LabelPrior::Empirical,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "batch size must be >= 2, got {}",
                self.batch_size
            )));
        }
        if self.epochs < 1 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.critic_steps < 1 {
            return Err(Error::InvalidConfig("critic_steps must be >= 1".into()));
        }
        self.generator_opt.validate()?;
        self.critic_opt.validate()?;
        if let Some(es) = self.early_stop {
            if es.window < 1 || es.tolerance.is_nan() || es.tolerance < 0.0 {
                return Err(Error::InvalidConfig(
                    "early stop needs window >= 1 and tolerance >= 0".into(),
                ));
            }
        }
        if self.grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidConfig(
                "grid values must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Means over one epoch's iterations. Weighted terms already carry their
/// trade-off factor; dropped terms are exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    pub epoch: usize,
    pub l_c: f64,
    /// Label-level critic value from the critic step.
    pub l_adv_n: f64,
    /// `alpha ·` the feature-level critic value from the critic step.
    pub alpha_l_adv_x: f64,
    pub beta_l_g: f64,
    pub gamma_l_aux: f64,
    pub total: f64,
    /// Seconds since training started, when a clock was supplied.
    pub wall_secs: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainLog {
    pub records: Vec<EpochRecord>,
    pub stopped_early: bool,
}

impl TrainLog {
    pub fn final_l_c(&self) -> Option<f64> {
        self.records.last().map(|r| r.l_c)
    }
}

/// Hooks into a running training loop.
pub trait Observer {
    /// Called after every iteration with the updated model. An error aborts
    /// training.
    fn after_iteration(
        &mut self,
        _epoch: usize,
        _iteration: usize,
        _model: &MgpllModel,
    ) -> Result<()> {
        Ok(())
    }

    /// Seconds since an arbitrary origin, if a clock is available.
    fn now_secs(&mut self) -> Option<f64> {
        None
    }
}

/// Observer that does nothing.
pub struct Silent;

impl Observer for Silent {}

/// Trains a fresh model on a normalized dataset.
pub fn train(
    ds: &PlDataset,
    variant: AblationVariant,
    cfg: &TrainConfig,
    mcfg: &MgpllConfig,
) -> Result<(MgpllModel, TrainLog)> {
    train_with(ds, variant, cfg, mcfg, &mut Silent)
}

pub fn train_with(
    ds: &PlDataset,
    variant: AblationVariant,
    cfg: &TrainConfig,
    mcfg: &MgpllConfig,
    observer: &mut dyn Observer,
) -> Result<(MgpllModel, TrainLog)> {
    cfg.validate()?;
    if ds.is_empty() {
        return Err(Error::InvalidData(
            "cannot train on an empty dataset".into(),
        ));
    }
    if !ds.is_normalized() {
        return Err(Error::InvalidData(
            "training features must be normalized to [-1, 1]".into(),
        ));
    }
    let mask = build_ablation_objective(variant);
    let mut model = MgpllModel::new(
        ds.dim(),
        ds.num_classes(),
        mcfg.clone(),
        &mut rng_for(cfg.seed, stream::INIT),
    )?;
    let mut order_rng = rng_for(cfg.seed, stream::TRAIN);
    let mut sampler = PriorSampler::new(mcfg.noise_dim, ds.num_classes(), cfg.seed, stream::PRIOR);

    let n = ds.len();
    let m = cfg.batch_size;
    let iterations = n.div_ceil(m);
    let (a, b, g) = (mcfg.alpha, mcfg.beta, mcfg.gamma);
    let start = observer.now_secs();
    let mut log = TrainLog::default();
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut order_rng);
        let mut sums = [0.0f64; 5];
        for it in 0..iterations {
            let idx: Vec<usize> = (0..m).map(|j| order[(it * m + j) % n]).collect();
            let x = ds.features().select_rows(&idx);
            let y = ds.candidates().select_rows(&idx);
            let draws = Draws::sample(&mut sampler, m);
            let diverged = |term| Error::Diverged {
                epoch,
                iteration: it,
                term,
            };

            let mut v_n = 0.0;
            let mut v_x = 0.0;
            for step in 0..cfg.critic_steps {
                let mut critic = ModelGrads::default();
                if mask.adv_n {
                    let out = terms::label_critic(&model, &y, &draws.z, &draws.eps)?;
                    critic.add_scaled(&out.grads, 1.0)?;
                    if step == 0 {
                        v_n = out.value;
                    }
                }
                if mask.adv_x {
                    let out = terms::feature_critic(&model, &x, &draws.z, &draws.eps)?;
                    critic.add_scaled(&out.grads, a)?;
                    if step == 0 {
                        v_x = out.value;
                    }
                }
                if !v_n.is_finite() {
                    return Err(diverged("label adversarial"));
                }
                if !v_x.is_finite() {
                    return Err(diverged("feature adversarial"));
                }
                if let Some(gr) = &critic.label_critic {
                    rmsprop_step(
                        &mut model.label_critic,
                        gr,
                        &cfg.critic_opt,
                        Direction::Ascent,
                    )?;
                }
                if let Some(gr) = &critic.feature_critic {
                    rmsprop_step(
                        &mut model.feature_critic,
                        gr,
                        &cfg.critic_opt,
                        Direction::Ascent,
                    )?;
                }
                clip_parameters(&mut model.label_critic, mcfg.clip_c);
                clip_parameters(&mut model.feature_critic, mcfg.clip_c);
            }

            let mut gen = ModelGrads::default();
            let mut tapes = Vec::new();
            let cls = terms::classification(&model, &x, &y, &draws.eps, None)?;
            if !cls.value.is_finite() {
                return Err(diverged("classification"));
            }
            gen.add_scaled(&cls.grads, 1.0)?;
            if mask.adv_n {
                let out = terms::label_generator(&model, &draws.z, &draws.eps)?;
                gen.add_scaled(&out.grads, 1.0)?;
            }
            if mask.adv_x {
                let out = terms::feature_generator(&model, &draws.z, &draws.eps_bar)?;
                gen.add_scaled(&out.grads, a)?;
                tapes.extend(out.feature_tapes);
            }
            let mut l_g = 0.0;
            if mask.generation {
                let out = terms::generation(&model, &x, &y, &draws.eps, &draws.eps_bar)?;
                if !out.value.is_finite() {
                    return Err(diverged("generation"));
                }
                l_g = out.value;
                gen.add_scaled(&out.grads, b)?;
                tapes.extend(out.feature_tapes);
            }
            let mut l_aux = 0.0;
            if mask.auxiliary {
                let out = terms::auxiliary(&model, &draws.z, &draws.eps_bar)?;
                if !out.value.is_finite() {
                    return Err(diverged("auxiliary"));
                }
                l_aux = out.value;
                gen.add_scaled(&out.grads, g)?;
                tapes.extend(out.feature_tapes);
            }
            if !gen.is_finite() {
                return Err(diverged("generator gradient"));
            }
            for tape in &tapes {
                model.feature_gen.absorb_batch_stats(tape);
            }
            for which in [Network::NoiseGen, Network::FeatureGen, Network::Predictor] {
                if let Some(gr) = gen.get(which) {
                    rmsprop_step(
                        model.network_mut(which),
                        gr,
                        &cfg.generator_opt,
                        Direction::Descent,
                    )?;
                }
            }

            sums[0] += cls.value;
            sums[1] += v_n;
            sums[2] += a * v_x;
            sums[3] += b * l_g;
            sums[4] += g * l_aux;
            observer.after_iteration(epoch, it, &model)?;
        }

        let k = iterations as f64;
        let [l_c, adv_n, adv_x, l_g, l_aux] = sums.map(|s| s / k);
        let wall_secs = match (start, observer.now_secs()) {
            (Some(s), Some(t)) => Some(t - s),
            _ => None,
        };
        log.records.push(EpochRecord {
            epoch,
            l_c,
            l_adv_n: adv_n,
            alpha_l_adv_x: adv_x,
            beta_l_g: l_g,
            gamma_l_aux: l_aux,
            total: l_c + adv_n + adv_x + l_g + l_aux,
            wall_secs,
        });

        if cfg.label_prior == LabelPrior::Empirical && mask.needs_prior() {
            let weights = denoised_label_frequencies(&model, ds, &mut sampler)?;
            sampler.set_weights(&weights)?;
        }

        if let Some(es) = cfg.early_stop {
            let r = &log.records;
            if r.len() > es.window {
                let then = r[r.len() - 1 - es.window].l_c;
                if libm::fabs(l_c - then) < es.tolerance {
                    log.stopped_early = true;
                    break;
                }
            }
        }
    }

    model.rng_state = Some(sampler.rng_state());
    Ok((model, log))
}

/// Class frequencies of `argmax(y ⊖ G_n([F(x) | eps]))` over the dataset,
/// with one fresh `eps` draw per instance.
pub fn denoised_label_frequencies(
    model: &MgpllModel,
    ds: &PlDataset,
    sampler: &mut PriorSampler,
) -> Result<Vec<f64>> {
    let eps = sampler.sample_noise(ds.len());
    let pred = model.predict(ds.features())?;
    let noise = model.gen_noise_labels(&pred, &eps)?;
    let (denoised, _) = denoise_batch(ds.candidates(), &noise)?;
    let mut counts = alloc::vec![0.0; ds.num_classes()];
    for row in denoised.iter_rows() {
        counts[argmax(row)] += 1.0;
    }
    let n = ds.len() as f64;
    Ok(counts.into_iter().map(|c| c / n).collect())
}

/// Training accuracy of a model against the dataset's ground truth.
pub fn training_accuracy(model: &MgpllModel, ds: &PlDataset) -> Result<f64> {
    let truth = ds
        .true_labels()
        .ok_or_else(|| Error::InvalidData("dataset has no ground-truth labels".into()))?;
    let preds = model.predict_labels(ds.features())?;
    let hits = preds.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}
