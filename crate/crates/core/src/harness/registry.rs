use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Registry shipped with the crate, written by `examples/calibrate_registry.rs`.
pub const SHIPPED: &str = include_str!("../../data/registry.toml");

/// One frozen constant with the calibration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    /// Largest statistic seen during calibration.
    #[serde(default)]
    pub observed: Option<f64>,
    /// Multiplier applied to `observed` (1.25 for 25% headroom).
    #[serde(default)]
    pub headroom: Option<f64>,
    #[serde(default)]
    pub note: String,
}

/// Frozen fitted constants. Read-only outside calibration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    #[serde(default)]
    pub calibration_seeds: Vec<u64>,
    #[serde(default)]
    pub grid_log2: Option<u32>,
    pub constants: BTreeMap<String, Entry>,
}

impl Registry {
    pub fn shipped() -> Result<Self> {
        Self::parse(SHIPPED)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let r: Self = toml::from_str(text).map_err(|e| Error::Config(format!("registry: {e}")))?;
        for (k, e) in &r.constants {
            if !(e.value > 0.0) || !e.value.is_finite() {
                return Err(Error::Config(format!(
                    "registry: constant '{k}' must be positive and finite, got {}",
                    e.value
                )));
            }
        }
        Ok(r)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        self.constants
            .get(key)
            .map(|e| e.value)
            .ok_or_else(|| Error::Config(format!("registry has no constant '{key}'")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("registry: {e}")))
    }
}
