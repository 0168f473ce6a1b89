//! RMSProp and weight clipping over [`MlpState`] parameters.

use crate::numkit::{Gradients, MlpState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RmsProp {
    pub lr: f64,
    pub decay: f64,
    pub eps: f64,
}

impl RmsProp {
    pub fn with_lr(lr: f64) -> Self {
        RmsProp {
            lr,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidConfig(
                "learning rate must be positive".into(),
            ));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::InvalidConfig(
                "rmsprop decay must be in (0,1)".into(),
            ));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::InvalidConfig("rmsprop eps must be positive".into()));
        }
        Ok(())
    }
}

impl Default for RmsProp {
    fn default() -> Self {
        RmsProp {
            lr: 5e-5,
            decay: 0.9,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Descent,
    /// Moves along `+grad`; used for the critics.
    Ascent,
}

/// `acc ← decay·acc + (1−decay)·g²`, `θ ← θ ∓ lr·g/√(acc+eps)`.
pub fn rmsprop_step(
    state: &mut MlpState,
    grads: &Gradients,
    opt: &RmsProp,
    direction: Direction,
) -> Result<()> {
    opt.validate()?;
    if !grads.is_finite() {
        return Err(Error::NonFinite("rmsprop gradient"));
    }
    if grads.layers().len() != state.params().len() {
        return Err(Error::Shape {
            context: "rmsprop_step",
            expected: (state.params().len(), 0),
            actual: (grads.layers().len(), 0),
        });
    }
    let (params, accum) = state.params_and_accum_mut();
    for ((p, a), g) in params.iter_mut().zip(accum.iter_mut()).zip(grads.layers()) {
        for ((ps, acs), gs) in p
            .slices_mut()
            .into_iter()
            .zip(a.slices_mut())
            .zip(g.slices())
        {
            if ps.len() != gs.len() {
                return Err(Error::Shape {
                    context: "rmsprop_step",
                    expected: (ps.len(), 1),
                    actual: (gs.len(), 1),
                });
            }
            for ((w, acc), &g) in ps.iter_mut().zip(acs.iter_mut()).zip(gs) {
                let g = match direction {
                    Direction::Descent => g,
                    Direction::Ascent => -g,
                };
                *acc = opt.decay * *acc + (1.0 - opt.decay) * g * g;
                *w -= opt.lr * g / libm::sqrt(*acc + opt.eps);
            }
        }
    }
    Ok(())
}

/// Clamps every learnable parameter into `[-c, c]`. Running batch-norm
/// statistics are left alone.
pub fn clip_parameters(state: &mut MlpState, c: f64) {
    assert!(c > 0.0, "clip bound must be positive");
    let (params, _) = state.params_and_accum_mut();
    for p in params {
        for s in p.slices_mut() {
            for v in s {
                *v = v.clamp(-c, c);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{Activation, LayerSpec, LayerTensors, Matrix, MlpSpec};
    use crate::rng::rng_for;
    use alloc::vec;

    fn scalar(w: f64) -> MlpState {
        let spec = MlpSpec::new(vec![LayerSpec::new(1, 1, Activation::Identity)]).unwrap();
        MlpState::from_params(
            spec,
            vec![LayerTensors {
                weight: Matrix::filled(1, 1, w),
                bias: vec![0.0],
                scale: vec![],
                shift: vec![],
            }],
        )
        .unwrap()
    }

    fn grad_of(state: &MlpState, gw: f64) -> Gradients {
        Gradients::from_flat(state, &[gw, 0.0]).unwrap()
    }

    #[test]
    fn hand_computed_step() {
        let mut s = scalar(1.0);
        let g = grad_of(&s, 2.0);
        let opt = RmsProp {
            lr: 0.1,
            decay: 0.9,
            eps: 1e-8,
        };
        rmsprop_step(&mut s, &g, &opt, Direction::Descent).unwrap();
        let acc = s.accumulators()[0].weight[(0, 0)];
        assert!((acc - 0.4).abs() < 1e-15);
        let expected = 1.0 - 0.1 * 2.0 / libm::sqrt(0.4 + 1e-8);
        assert!((s.param(0) - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_only_decays_accumulators() {
        let mut s = scalar(0.3);
        let opt = RmsProp::with_lr(0.1);
        let g = grad_of(&s, 1.0);
        rmsprop_step(&mut s, &g, &opt, Direction::Descent).unwrap();
        let acc_before = s.accumulators()[0].weight[(0, 0)];
        let w_before = s.param(0);
        let zero = Gradients::zeros_like(&s);
        rmsprop_step(&mut s, &zero, &opt, Direction::Descent).unwrap();
        assert_eq!(s.param(0), w_before);
        assert_eq!(s.accumulators()[0].weight[(0, 0)], 0.9 * acc_before);
    }

    #[test]
    fn ascent_is_descent_on_negated_gradient() {
        let spec =
            MlpSpec::stack(&[3, 5, 2], Activation::Tanh, Activation::Identity, &[0]).unwrap();
        let base = MlpState::new(spec, &mut rng_for(5, 0));
        let x = Matrix::from_vec(2, 3, vec![0.1, -0.2, 0.3, 0.5, 0.4, -0.9]).unwrap();
        let (y, tape) = base.forward(&x, crate::numkit::Mode::Train).unwrap();
        let (g, _) = base.backward(&tape, &y).unwrap();
        let mut neg = g.clone();
        neg.scale(-1.0);
        let opt = RmsProp::with_lr(0.01);
        let mut a = base.clone();
        let mut d = base.clone();
        rmsprop_step(&mut a, &g, &opt, Direction::Ascent).unwrap();
        rmsprop_step(&mut d, &neg, &opt, Direction::Descent).unwrap();
        for i in 0..a.param_count() {
            assert_eq!(a.param(i).to_bits(), d.param(i).to_bits());
        }
        assert_eq!(a.accumulators(), d.accumulators());
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut s = scalar(1.0);
        let g = grad_of(&s, f64::INFINITY);
        assert!(rmsprop_step(&mut s, &g, &RmsProp::with_lr(0.1), Direction::Descent).is_err());
        assert_eq!(s.param(0), 1.0);
    }

    #[test]
    fn clip_examples() {
        let mut s = scalar(0.7);
        clip_parameters(&mut s, 0.01);
        assert_eq!(s.param(0), 0.01);

        let mut inside = scalar(0.004);
        let before = inside.params().to_vec();
        clip_parameters(&mut inside, 0.01);
        assert_eq!(inside.params(), &before[..]);
    }

    #[test]
    fn clip_max_matches_scan_and_is_idempotent() {
        let spec = MlpSpec::stack(
            &[4, 6, 3],
            Activation::LeakyRelu(0.01),
            Activation::Identity,
            &[0],
        )
        .unwrap();
        for seed in 0..20 {
            let mut s = MlpState::new(spec.clone(), &mut rng_for(seed, 0));
            let prev = (0..s.param_count())
                .map(|i| s.param(i).abs())
                .fold(0.0, f64::max);
            let c = 0.05 + seed as f64 * 0.05;
            clip_parameters(&mut s, c);
            assert_eq!(s.max_abs_param(), prev.min(c));
            let once = s.params().to_vec();
            clip_parameters(&mut s, c);
            assert_eq!(s.params(), &once[..]);
        }
    }

    #[test]
    fn clip_leaves_running_stats() {
        let spec = MlpSpec::new(vec![
            LayerSpec::new(1, 1, Activation::Identity).with_batch_norm()
        ])
        .unwrap();
        let mut s = MlpState::new(spec, &mut rng_for(1, 0));
        let x = Matrix::from_vec(2, 1, vec![10.0, 30.0]).unwrap();
        let (_, tape) = s.forward(&x, crate::numkit::Mode::Train).unwrap();
        s.absorb_batch_stats(&tape);
        let run = s.running_stats().to_vec();
        clip_parameters(&mut s, 0.01);
        assert_eq!(s.running_stats(), &run[..]);
        assert!(s.max_abs_param() <= 0.01);
    }
}
