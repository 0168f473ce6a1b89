//! The five loss terms and their gradient routing.
//!
//! Every term takes its random draws explicitly so the same draw can be
//! replayed, e.g. under finite differences. Critic values follow the
//! Wasserstein convention `mean D(real) − mean D(fake)`; the generator side of
//! each adversarial term is `−mean D(fake)`.

use alloc::vec;
use alloc::vec::Vec;

use super::labels::{augment_batch, denoise_batch};
use super::model::{MgpllModel, Network};
use super::prior::PriorSampler;
use crate::numkit::{
    cross_entropy, cross_entropy_grad, mse, mse_grad, Gradients, Matrix, Mode, Tape,
};
use crate::Result;

/// Random inputs of one training iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Draws {
    /// One-hot labels from the label prior.
    pub z: Matrix,
    /// Noise shared by the critic step and the denoising paths.
    pub eps: Matrix,
    /// Noise redrawn after the critic step, used for feature generation.
    pub eps_bar: Matrix,
}

impl Draws {
    /// Draws `z`, then `eps`, then `eps_bar`, each with `m` rows.
    pub fn sample(sampler: &mut PriorSampler, m: usize) -> Self {
        let (z, _) = sampler.sample_labels(m);
        let eps = sampler.sample_noise(m);
        let eps_bar = sampler.sample_noise(m);
        Draws { z, eps, eps_bar }
    }
}

/// Optional gradient per network.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelGrads {
    pub noise_gen: Option<Gradients>,
    pub feature_gen: Option<Gradients>,
    pub predictor: Option<Gradients>,
    pub label_critic: Option<Gradients>,
    pub feature_critic: Option<Gradients>,
}

impl ModelGrads {
    pub fn get(&self, which: Network) -> Option<&Gradients> {
        match which {
            Network::NoiseGen => self.noise_gen.as_ref(),
            Network::FeatureGen => self.feature_gen.as_ref(),
            Network::Predictor => self.predictor.as_ref(),
            Network::LabelCritic => self.label_critic.as_ref(),
            Network::FeatureCritic => self.feature_critic.as_ref(),
        }
    }

    fn slot(&mut self, which: Network) -> &mut Option<Gradients> {
        match which {
            Network::NoiseGen => &mut self.noise_gen,
            Network::FeatureGen => &mut self.feature_gen,
            Network::Predictor => &mut self.predictor,
            Network::LabelCritic => &mut self.label_critic,
            Network::FeatureCritic => &mut self.feature_critic,
        }
    }

    fn put(&mut self, which: Network, g: Gradients) {
        *self.slot(which) = Some(g);
    }

    /// `self += weight · other`, network by network.
    pub fn add_scaled(&mut self, other: &ModelGrads, weight: f64) -> Result<()> {
        for which in Network::ALL {
            if let Some(g) = other.get(which) {
                let mut g = g.clone();
                g.scale(weight);
                match self.slot(which) {
                    Some(acc) => acc.add_assign(&g)?,
                    slot @ None => *slot = Some(g),
                }
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        Network::ALL
            .iter()
            .all(|&w| self.get(w).is_none_or(Gradients::is_finite))
    }
}

/// Value of a term, its gradients, and the Train-mode feature-generator tapes
/// whose batch statistics the caller may fold into the running estimates.
#[derive(Debug, Clone)]
pub struct TermOutput {
    pub value: f64,
    pub grads: ModelGrads,
    pub feature_tapes: Vec<Tape>,
}

/// Gradient of `mean(out)` for a single-column critic output, times `sign`.
fn mean_grad(rows: usize, sign: f64) -> Matrix {
    Matrix::filled(rows, 1, sign / rows as f64)
}

fn first_cols(m: &Matrix, n: usize) -> Matrix {
    m.col_range(0, n)
}

/// Classification term: `mse(F(x), y ⊖ G_n([F(x) | eps]))`.
///
/// The condition fed to the noise generator is `F(x)` held constant, unless
/// `condition` overrides it. Gradients go to the predictor through its
/// prediction and to the noise generator through the denoised target.
pub fn classification(
    model: &MgpllModel,
    x: &Matrix,
    y: &Matrix,
    eps: &Matrix,
    condition: Option<&Matrix>,
) -> Result<TermOutput> {
    let l = model.num_classes();
    y.ensure_shape("candidate batch", x.rows(), l)?;
    let (pred, f_tape) = model.predictor.forward(x, Mode::Train)?;
    let cond = condition.unwrap_or(&pred);
    let n_in = model.noise_gen_input(cond, eps)?;
    let (noise, n_tape) = model.noise_gen.forward(&n_in, Mode::Train)?;
    let (target, mask) = denoise_batch(y, &noise)?;

    let value = mse(&pred, &target)?;
    let g_pred = mse_grad(&pred, &target)?;
    let (g_f, _) = model.predictor.backward(&f_tape, &g_pred)?;
    // ∂/∂target = −g_pred, ∂target/∂noise = −mask
    let g_noise = g_pred.zip_map(&mask, |g, k| g * k)?;
    let (g_n, _) = model.noise_gen.backward(&n_tape, &g_noise)?;

    let mut grads = ModelGrads::default();
    grads.put(Network::Predictor, g_f);
    grads.put(Network::NoiseGen, g_n);
    Ok(TermOutput {
        value,
        grads,
        feature_tapes: Vec::new(),
    })
}

/// Label-level critic value `mean D_n(y) − mean D_n(z ⊕ G_n(z, eps))` with its
/// gradient for the label critic (to be ascended).
pub fn label_critic(
    model: &MgpllModel,
    y: &Matrix,
    z: &Matrix,
    eps: &Matrix,
) -> Result<TermOutput> {
    let n_in = model.noise_gen_input(z, eps)?;
    let (noise, _) = model.noise_gen.forward(&n_in, Mode::Train)?;
    let (fake, _) = augment_batch(z, &noise)?;
    let (real_out, real_tape) = model.label_critic.forward(y, Mode::Train)?;
    let (fake_out, fake_tape) = model.label_critic.forward(&fake, Mode::Train)?;
    let value = real_out.mean() - fake_out.mean();

    let (mut g, _) = model
        .label_critic
        .backward(&real_tape, &mean_grad(y.rows(), 1.0))?;
    let (g_fake, _) = model
        .label_critic
        .backward(&fake_tape, &mean_grad(fake.rows(), -1.0))?;
    g.add_assign(&g_fake)?;
    let mut grads = ModelGrads::default();
    grads.put(Network::LabelCritic, g);
    Ok(TermOutput {
        value,
        grads,
        feature_tapes: Vec::new(),
    })
}

/// Generator side of the label-level term, `−mean D_n(z ⊕ G_n(z, eps))`,
/// with its gradient for the noise generator.
pub fn label_generator(model: &MgpllModel, z: &Matrix, eps: &Matrix) -> Result<TermOutput> {
    let n_in = model.noise_gen_input(z, eps)?;
    let (noise, n_tape) = model.noise_gen.forward(&n_in, Mode::Train)?;
    let (fake, mask) = augment_batch(z, &noise)?;
    let (out, tape) = model.label_critic.forward(&fake, Mode::Train)?;
    let value = -out.mean();

    let (_, g_fake) = model
        .label_critic
        .backward(&tape, &mean_grad(fake.rows(), -1.0))?;
    let g_noise = g_fake.zip_map(&mask, |g, k| g * k)?;
    let (g_n, _) = model.noise_gen.backward(&n_tape, &g_noise)?;
    let mut grads = ModelGrads::default();
    grads.put(Network::NoiseGen, g_n);
    Ok(TermOutput {
        value,
        grads,
        feature_tapes: Vec::new(),
    })
}

/// Feature-level critic value `mean D_x(x) − mean D_x(G_x(z, eps))` with its
/// gradient for the feature critic (to be ascended).
pub fn feature_critic(
    model: &MgpllModel,
    x: &Matrix,
    z: &Matrix,
    eps: &Matrix,
) -> Result<TermOutput> {
    let g_in = model.feature_gen_input(z, eps)?;
    let (fake, gx_tape) = model.feature_gen.forward(&g_in, Mode::Train)?;
    let (real_out, real_tape) = model.feature_critic.forward(x, Mode::Train)?;
    let (fake_out, fake_tape) = model.feature_critic.forward(&fake, Mode::Train)?;
    let value = real_out.mean() - fake_out.mean();

    let (mut g, _) = model
        .feature_critic
        .backward(&real_tape, &mean_grad(x.rows(), 1.0))?;
    let (g_fake, _) = model
        .feature_critic
        .backward(&fake_tape, &mean_grad(fake.rows(), -1.0))?;
    g.add_assign(&g_fake)?;
    let mut grads = ModelGrads::default();
    grads.put(Network::FeatureCritic, g);
    Ok(TermOutput {
        value,
        grads,
        feature_tapes: vec![gx_tape],
    })
}

/// Generator side of the feature-level term, `−mean D_x(G_x(z, eps))`, with
/// its gradient for the feature generator.
pub fn feature_generator(model: &MgpllModel, z: &Matrix, eps: &Matrix) -> Result<TermOutput> {
    let g_in = model.feature_gen_input(z, eps)?;
    let (fake, gx_tape) = model.feature_gen.forward(&g_in, Mode::Train)?;
    let (out, tape) = model.feature_critic.forward(&fake, Mode::Train)?;
    let value = -out.mean();

    let (_, g_fake) = model
        .feature_critic
        .backward(&tape, &mean_grad(fake.rows(), -1.0))?;
    let (g_x, _) = model.feature_gen.backward(&gx_tape, &g_fake)?;
    let mut grads = ModelGrads::default();
    grads.put(Network::FeatureGen, g_x);
    Ok(TermOutput {
        value,
        grads,
        feature_tapes: vec![gx_tape],
    })
}

/// Generation term: `mse(G_x([y ⊖ G_n([F(x) | eps1]) | eps2]), x)`, with
/// gradients for the feature generator, the noise generator and the predictor.
pub fn generation(
    model: &MgpllModel,
    x: &Matrix,
    y: &Matrix,
    eps1: &Matrix,
    eps2: &Matrix,
) -> Result<TermOutput> {
    let l = model.num_classes();
    y.ensure_shape("candidate batch", x.rows(), l)?;
    let (pred, f_tape) = model.predictor.forward(x, Mode::Train)?;
    let n_in = model.noise_gen_input(&pred, eps1)?;
    let (noise, n_tape) = model.noise_gen.forward(&n_in, Mode::Train)?;
    let (denoised, mask) = denoise_batch(y, &noise)?;
    let g_in = model.feature_gen_input(&denoised, eps2)?;
    let (regen, gx_tape) = model.feature_gen.forward(&g_in, Mode::Train)?;
    let value = mse(&regen, x)?;

    let (g_x, g_in_grad) = model
        .feature_gen
        .backward(&gx_tape, &mse_grad(&regen, x)?)?;
    let g_denoised = first_cols(&g_in_grad, l);
    let g_noise = g_denoised.zip_map(&mask, |g, k| -g * k)?;
    let (g_n, g_n_in) = model.noise_gen.backward(&n_tape, &g_noise)?;

    let mut grads = ModelGrads::default();
    grads.put(Network::FeatureGen, g_x);
    grads.put(Network::NoiseGen, g_n);
    if model.config.label_conditioned_noise {
        let g_pred = first_cols(&g_n_in, l);
        let (g_f, _) = model.predictor.backward(&f_tape, &g_pred)?;
        grads.put(Network::Predictor, g_f);
    } else {
        grads.put(Network::Predictor, Gradients::zeros_like(&model.predictor));
    }
    Ok(TermOutput {
        value,
        grads,
        feature_tapes: vec![gx_tape],
    })
}

/// Auxiliary term: cross-entropy between `F(G_x(z, eps))` and `z`, with
/// gradients for the predictor and the feature generator.
pub fn auxiliary(model: &MgpllModel, z: &Matrix, eps: &Matrix) -> Result<TermOutput> {
    let g_in = model.feature_gen_input(z, eps)?;
    let (fake, gx_tape) = model.feature_gen.forward(&g_in, Mode::Train)?;
    let (prob, f_tape) = model.predictor.forward(&fake, Mode::Train)?;
    let value = cross_entropy(&prob, z)?;

    let (g_f, g_fake) = model
        .predictor
        .backward(&f_tape, &cross_entropy_grad(&prob, z)?)?;
    let (g_x, _) = model.feature_gen.backward(&gx_tape, &g_fake)?;
    let mut grads = ModelGrads::default();
    grads.put(Network::Predictor, g_f);
    grads.put(Network::FeatureGen, g_x);
    Ok(TermOutput {
        value,
        grads,
        feature_tapes: vec![gx_tape],
    })
}

/// Unweighted term values and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub l_c: f64,
    /// Label-level critic value.
    pub adv_n: f64,
    /// Feature-level critic value.
    pub adv_x: f64,
    pub l_g: f64,
    pub l_aux: f64,
    pub total: f64,
}

impl Objective {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        l_c: f64,
        adv_n: f64,
        adv_x: f64,
        l_g: f64,
        l_aux: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
    ) -> Self {
        Objective {
            l_c,
            adv_n,
            adv_x,
            l_g,
            l_aux,
            total: l_c + adv_n + alpha * adv_x + beta * l_g + gamma * l_aux,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.l_c, self.adv_n, self.adv_x, self.l_g, self.l_aux, self.total,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Evaluates every term on one batch and one set of draws, using the same
/// noise assignment as a generator step: `eps` for denoising and label
/// generation, `eps_bar` for feature generation.
pub fn total_objective(
    model: &MgpllModel,
    x: &Matrix,
    y: &Matrix,
    draws: &Draws,
) -> Result<Objective> {
    let c = &model.config;
    let l_c = classification(model, x, y, &draws.eps, None)?.value;
    let adv_n = label_critic(model, y, &draws.z, &draws.eps)?.value;
    let adv_x = feature_critic(model, x, &draws.z, &draws.eps_bar)?.value;
    let l_g = generation(model, x, y, &draws.eps, &draws.eps_bar)?.value;
    let l_aux = auxiliary(model, &draws.z, &draws.eps_bar)?.value;
    Ok(Objective::new(
        l_c, adv_n, adv_x, l_g, l_aux, c.alpha, c.beta, c.gamma,
    ))
}
