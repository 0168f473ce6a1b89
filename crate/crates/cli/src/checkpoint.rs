//! Trained-model checkpoints as JSON.

use std::path::Path;

use mgpll_core::mgpll::MgpllModel;
use mgpll_core::pldata::Normalizer;
use mgpll_core::train::{AblationVariant, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Everything needed to predict on raw features: the model, the feature
/// normalizer fitted on its training data, and the class names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub dataset: String,
    pub variant: AblationVariant,
    pub train: TrainConfig,
    pub normalizer: Normalizer,
    pub class_names: Vec<String>,
    pub model: MgpllModel,
}

impl Checkpoint {
    pub fn new(
        dataset: &str,
        variant: AblationVariant,
        train: TrainConfig,
        normalizer: Normalizer,
        class_names: Vec<String>,
        model: MgpllModel,
    ) -> Self {
        Checkpoint {
            format_version: CHECKPOINT_VERSION,
            dataset: dataset.to_string(),
            variant,
            train,
            normalizer,
            class_names,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(text)?;
        if ck.format_version != CHECKPOINT_VERSION {
            return Err(CliError::Config(format!(
                "checkpoint format version {} is not supported (expected {CHECKPOINT_VERSION})",
                ck.format_version
            )));
        }
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)
            .map_err(|e| CliError::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }
}
