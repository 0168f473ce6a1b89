//! `key = value` run configuration files.
//!
//! One setting per line; blank lines and lines starting with `#` are ignored.
//! Keys use the long flag names without the leading dashes, e.g.
//! `epochs = 50` or `learning-rate = 1e-3`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    source: String,
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::parse(source, k + 1, format!("expected key = value, got {line:?}"))
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::parse(source, k + 1, "empty key"));
            }
            if values
                .insert(key.clone(), (k + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(CliError::parse(
                    source,
                    k + 1,
                    format!("key {key:?} set twice"),
                ));
            }
        }
        Ok(ConfigFile {
            source: source.to_string(),
            values,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| {
                CliError::parse(&self.source, *line, format!("bad value {v:?} for {key}"))
            }),
        }
    }

    /// Errors on the first key not in `known`.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for (key, (line, _)) in &self.values {
            if !known.contains(&key.as_str()) {
                return Err(CliError::parse(
                    &self.source,
                    *line,
                    format!("unknown key {key:?}"),
                ));
            }
        }
        Ok(())
    }
}
