//! Run configuration: defaults, an optional TOML file, spec options and
//! command-line flags, applied in that order.

use std::path::Path;

use realpv_core::diffring::HarnessBounds;
use serde::{Deserialize, Serialize};

use crate::spec::SpecOptions;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Terms per germ window.
    pub window: usize,
    /// Largest index of an enumerated subgroup.
    pub index_bound: i64,
    /// Simplicity harness: largest generator support.
    pub support: usize,
    /// Simplicity harness: largest absolute exponent.
    pub degree: i64,
    /// Box radius of the monomials used by the germ morphism check.
    pub morphism_radius: i64,
    /// Worker threads; results do not depend on it.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        let h = HarnessBounds::default();
        Config {
            window: realpv_core::seqmodel::DEFAULT_WINDOW,
            index_bound: 6,
            support: h.support,
            degree: h.degree,
            morphism_radius: 1,
            threads: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &SpecOptions) {
        if let Some(v) = o.window {
            self.window = v;
        }
        if let Some(v) = o.index_bound {
            self.index_bound = v;
        }
        if let Some(v) = o.support {
            self.support = v;
        }
        if let Some(v) = o.degree {
            self.degree = v;
        }
    }

    pub fn harness(&self) -> HarnessBounds {
        HarnessBounds {
            support: self.support,
            degree: self.degree,
        }
    }
}
