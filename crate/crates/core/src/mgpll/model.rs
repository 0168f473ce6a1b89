use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::numkit::{Activation, Matrix, MlpSpec, MlpState, Mode, DEFAULT_LEAKY_SLOPE};
use crate::rng::RngState;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MgpllConfig {
    /// Weight of the feature-level adversarial term.
    pub alpha: f64,
    /// Weight of the generation (reconstruction) term.
    pub beta: f64,
    /// Weight of the auxiliary classification term on generated data.
    pub gamma: f64,
    /// Critic parameters are clipped to `[-clip_c, clip_c]`.
    pub clip_c: f64,
    pub noise_dim: usize,
    /// `false` drops the label input of the noise generator.
    pub label_conditioned_noise: bool,
    /// Hidden width of both generators and the predictor.
    pub gen_width: usize,
    /// Hidden width of both critics.
    pub critic_width: usize,
    pub leaky_slope: f64,
}

impl Default for MgpllConfig {
    fn default() -> Self {
        MgpllConfig {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            clip_c: 0.01,
            noise_dim: 16,
            label_conditioned_noise: true,
            gen_width: 128,
            critic_width: 64,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
        }
    }
}

impl MgpllConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        if !(self.clip_c > 0.0 && self.clip_c.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "clip_c must be > 0, got {}",
                self.clip_c
            )));
        }
        if self.noise_dim == 0 {
            return Err(Error::InvalidConfig("noise_dim must be >= 1".into()));
        }
        if self.gen_width == 0 || self.critic_width == 0 {
            return Err(Error::InvalidConfig("network widths must be >= 1".into()));
        }
        Ok(())
    }
}

/// The five component networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Network {
    NoiseGen,
    FeatureGen,
    Predictor,
    LabelCritic,
    FeatureCritic,
}

impl Network {
    pub const ALL: [Network; 5] = [
        Network::NoiseGen,
        Network::FeatureGen,
        Network::Predictor,
        Network::LabelCritic,
        Network::FeatureCritic,
    ];
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MgpllModel {
    /// `(z, ε) → [0,1]^L`, four layers, sigmoid output.
    pub noise_gen: MlpState,
    /// `(z, ε) → [-1,1]^d`, five layers, tanh output, batch norm on the
    /// middle three.
    pub feature_gen: MlpState,
    /// `x → simplex`, three layers, softmax output.
    pub predictor: MlpState,
    /// `[0,1]^L → R`, three layers, linear output.
    pub label_critic: MlpState,
    /// `R^d → R`, three layers, linear output.
    pub feature_critic: MlpState,
    pub config: MgpllConfig,
    dim: usize,
    num_classes: usize,
    /// Training RNG position at the time of the last checkpoint, if any.
    pub rng_state: Option<RngState>,
}

impl MgpllModel {
    /// Initializes all five networks from `rng` in the order noise generator,
    /// feature generator, predictor, label critic, feature critic.
    pub fn new<R: Rng + ?Sized>(
        dim: usize,
        num_classes: usize,
        config: MgpllConfig,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        if dim == 0 || num_classes == 0 {
            return Err(Error::InvalidConfig(
                "feature and label dims must be >= 1".into(),
            ));
        }
        let hidden = Activation::LeakyRelu(config.leaky_slope);
        let (w, cw, k, l) = (
            config.gen_width,
            config.critic_width,
            config.noise_dim,
            num_classes,
        );
        let noise_in = if config.label_conditioned_noise {
            l + k
        } else {
            k
        };

        let noise_gen = MlpSpec::stack(&[noise_in, w, w, w, l], hidden, Activation::Sigmoid, &[])?;
        let feature_gen = MlpSpec::stack(
            &[l + k, w, w, w, w, dim],
            hidden,
            Activation::Tanh,
            &[1, 2, 3],
        )?;
        let predictor = MlpSpec::stack(&[dim, w, w, l], hidden, Activation::Softmax, &[])?;
        let label_critic = MlpSpec::stack(&[l, cw, cw, 1], hidden, Activation::Identity, &[])?;
        let feature_critic = MlpSpec::stack(&[dim, cw, cw, 1], hidden, Activation::Identity, &[])?;

        Ok(MgpllModel {
            noise_gen: MlpState::new(noise_gen, rng),
            feature_gen: MlpState::new(feature_gen, rng),
            predictor: MlpState::new(predictor, rng),
            label_critic: MlpState::new(label_critic, rng),
            feature_critic: MlpState::new(feature_critic, rng),
            config,
            dim,
            num_classes,
            rng_state: None,
        })
    }

    /// Reassembles a model from parts (e.g. a checkpoint), checking that the
    /// networks fit together.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        noise_gen: MlpState,
        feature_gen: MlpState,
        predictor: MlpState,
        label_critic: MlpState,
        feature_critic: MlpState,
        config: MgpllConfig,
        rng_state: Option<RngState>,
    ) -> Result<Self> {
        config.validate()?;
        let dim = predictor.input_dim();
        let num_classes = predictor.output_dim();
        let k = config.noise_dim;
        let noise_in = if config.label_conditioned_noise {
            num_classes + k
        } else {
            k
        };
        let ok = noise_gen.input_dim() == noise_in
            && noise_gen.output_dim() == num_classes
            && feature_gen.input_dim() == num_classes + k
            && feature_gen.output_dim() == dim
            && label_critic.input_dim() == num_classes
            && label_critic.output_dim() == 1
            && feature_critic.input_dim() == dim
            && feature_critic.output_dim() == 1;
        if !ok {
            return Err(Error::InvalidConfig(
                "network dimensions do not fit together".into(),
            ));
        }
        Ok(MgpllModel {
            noise_gen,
            feature_gen,
            predictor,
            label_critic,
            feature_critic,
            config,
            dim,
            num_classes,
            rng_state,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn network(&self, which: Network) -> &MlpState {
        match which {
            Network::NoiseGen => &self.noise_gen,
            Network::FeatureGen => &self.feature_gen,
            Network::Predictor => &self.predictor,
            Network::LabelCritic => &self.label_critic,
            Network::FeatureCritic => &self.feature_critic,
        }
    }

    pub fn network_mut(&mut self, which: Network) -> &mut MlpState {
        match which {
            Network::NoiseGen => &mut self.noise_gen,
            Network::FeatureGen => &mut self.feature_gen,
            Network::Predictor => &mut self.predictor,
            Network::LabelCritic => &mut self.label_critic,
            Network::FeatureCritic => &mut self.feature_critic,
        }
    }

    /// Input of the noise generator: `[condition | ε]`, or `ε` alone when
    /// the generator is unconditioned.
    pub(crate) fn noise_gen_input(&self, condition: &Matrix, eps: &Matrix) -> Result<Matrix> {
        condition.ensure_shape("noise generator condition", eps.rows(), self.num_classes)?;
        eps.ensure_shape(
            "noise generator eps",
            condition.rows(),
            self.config.noise_dim,
        )?;
        if self.config.label_conditioned_noise {
            condition.hconcat(eps)
        } else {
            Ok(eps.clone())
        }
    }

    pub(crate) fn feature_gen_input(&self, z: &Matrix, eps: &Matrix) -> Result<Matrix> {
        z.ensure_shape("feature generator labels", eps.rows(), self.num_classes)?;
        eps.ensure_shape("feature generator eps", z.rows(), self.config.noise_dim)?;
        z.hconcat(eps)
    }

    /// Soft noise-label vectors for labels `z` and noise `eps`.
    pub fn gen_noise_labels(&self, z: &Matrix, eps: &Matrix) -> Result<Matrix> {
        let input = self.noise_gen_input(z, eps)?;
        Ok(self.noise_gen.forward(&input, Mode::Eval)?.0)
    }

    /// Generated features for labels `z` and noise `eps`.
    pub fn gen_features(&self, z: &Matrix, eps: &Matrix, mode: Mode) -> Result<Matrix> {
        let input = self.feature_gen_input(z, eps)?;
        Ok(self.feature_gen.forward(&input, mode)?.0)
    }

    /// Class probabilities, one row per instance.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        x.ensure_shape("predict input", x.rows(), self.dim)?;
        Ok(self.predictor.forward(x, Mode::Eval)?.0)
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<usize> {
        let row = Matrix::from_vec(1, x.len(), x.to_vec())?;
        Ok(argmax(self.predict(&row)?.row(0)))
    }

    pub fn predict_labels(&self, x: &Matrix) -> Result<Vec<usize>> {
        let probs = self.predict(x)?;
        Ok(probs.iter_rows().map(argmax).collect())
    }

    pub fn critics_max_abs(&self) -> f64 {
        self.label_critic
            .max_abs_param()
            .max(self.feature_critic.max_abs_param())
    }
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}
