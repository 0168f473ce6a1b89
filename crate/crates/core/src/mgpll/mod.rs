//! The model: five networks, the candidate-label algebra and every loss term.

pub mod gradcheck;
mod labels;
mod model;
mod prior;
pub mod terms;

pub use labels::{augment, augment_batch, denoise, denoise_batch, CandidateLabelVector};
pub use model::{argmax, MgpllConfig, MgpllModel, Network};
pub use prior::PriorSampler;
pub use terms::{total_objective, Draws, ModelGrads, Objective, TermOutput};
