//! File formats, checkpoints, reports and experiment drivers for
//! `mgpll-core`, plus the `mgpll` command-line tool.

pub mod checkpoint;
pub mod config;
pub mod error;
pub mod experiment;
pub mod format;
pub mod hash;
pub mod report;
pub mod trainlog;

pub use error::{CliError, Result};
