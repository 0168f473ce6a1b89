//! Dense numerics: matrices, sequential MLPs, losses and optimizers.

pub mod gradcheck;
pub mod loss;
pub mod matrix;
pub mod mlp;
pub mod optim;

pub use loss::{cross_entropy, cross_entropy_grad, mse, mse_grad, LOG_FLOOR};
pub use matrix::Matrix;
pub use mlp::{
    Activation, Gradients, LayerSpec, LayerTensors, MlpSpec, MlpState, Mode, RunningStats, Tape,
    DEFAULT_LEAKY_SLOPE,
};
pub use optim::{clip_parameters, rmsprop_step, Direction, RmsProp};
