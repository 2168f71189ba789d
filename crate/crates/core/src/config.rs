use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{DebounceConfig, NoiseModel};
use crate::sim::SimConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub error_rate: f64,
    pub dropout_p: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            error_rate: 0.0,
            dropout_p: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServerConfig {
    pub port: u16,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { port: 8765 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub noise: NoiseConfig,
    pub debounce: DebounceConfig,
    pub sim: SimConfig,
    pub server: ServerConfig,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("BAD_CONFIG: {0}")]
    BadConfig(String),
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config =
            serde_json::from_str(text).map_err(|e| ConfigError::BadConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::BadConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.noise_model().map_err(|e| ConfigError::BadConfig(format!("noise: {e}")))?;
        self.debounce.validate().map_err(ConfigError::BadConfig)?;
        self.sim.validate().map_err(ConfigError::BadConfig)?;
        Ok(())
    }

    pub fn noise_model(&self) -> Result<NoiseModel, crate::channel::ChannelError> {
        NoiseModel::symmetric(self.noise.error_rate, self.noise.dropout_p, self.seed)
    }
}
