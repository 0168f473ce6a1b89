//! Partial-label datasets and the tooling around them.

mod blobs;
mod dataset;
mod kfold;
mod normalize;
mod synth;

pub use blobs::{gaussian_blobs, BlobConfig, ECOLI_CLASS_COUNTS};
pub use dataset::PlDataset;
pub use kfold::{kfold_split, FoldPlan};
pub use normalize::{normalize_features, Normalizer};
pub use synth::{coupling_map, synthesize, Coupling, NoiseMode, SynthConfig};
