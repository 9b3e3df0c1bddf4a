//! Run configuration: target precision, escalation cap, Baker constants
//! and output format. Loaded from TOML with an environment override.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BakerConfig;
use crate::interval::bits_for_tolerance;

/// Overrides `precision` when set.
pub const PRECISION_ENV: &str = "CUBIC_THUE_PRECISION";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Target enclosure width.
    pub precision: f64,
    pub max_precision_bits: u32,
    pub baker: BakerConfig,
    pub output: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision: 1e-30,
            max_precision_bits: 4096,
            baker: BakerConfig::default(),
            output: OutputFormat::Json,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// File (or defaults), then the environment override.
    pub fn resolve(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Config::default(),
        };
        if let Ok(v) = std::env::var(PRECISION_ENV) {
            cfg.precision = v
                .trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("{PRECISION_ENV}={v} is not a number")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.precision.is_finite() && self.precision > 0.0) {
            return Err(ConfigError::Invalid("precision must be positive".into()));
        }
        if self.max_precision_bits < self.initial_bits() {
            return Err(ConfigError::Invalid(format!(
                "max_precision_bits = {} is below the {} bits needed for precision {:e}",
                self.max_precision_bits,
                self.initial_bits(),
                self.precision
            )));
        }
        self.baker
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn initial_bits(&self) -> u32 {
        bits_for_tolerance(self.precision)
    }
}
