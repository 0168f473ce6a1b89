//! Multi-level adversarial partial-label learning.
//!
//! A partial-label (PL) training set pairs every instance with a candidate
//! label set that contains the hidden true label plus noise labels. This crate
//! learns a classifier from such data with five cooperating networks:
//!
//! - a conditional noise-label generator that models which noise labels
//!   accompany a given true label,
//! - a conditional feature generator that maps (denoised) labels back to
//!   feature space,
//! - a label-level and a feature-level Wasserstein critic,
//! - the predictor itself.
//!
//! Everything here is pure computation over `alloc` collections, so the crate
//! is `no_std`. File formats, checkpoints and the command line live in the
//! `mgpll-cli` companion crate.
//!
//! Module map:
//!
//! - [`numkit`]: dense matrices, sequential MLPs with exact backprop,
//!   losses, RMSProp and weight clipping.
//! - [`pldata`]: the PL dataset type, feature normalization, the controlled
//!   corruption protocol and k-fold planning.
//! - [`mgpll`]: the candidate-label algebra, priors, the model bundle and
//!   every loss term with its gradient routing.
//! - [`train`]: the alternating critic/generator loop, ablation masks and
//!   hyperparameter selection.
//! - [`baseline`]: the PL-KNN baseline.
//! - [`eval`]: metrics, cross-validation, the paired t-test and report
//!   assembly.

#![no_std]

extern crate alloc;

pub mod baseline;
pub mod error;
pub mod eval;
pub mod mgpll;
pub mod numkit;
pub mod pldata;
pub mod rng;
pub mod train;

pub use error::{Error, Result};
