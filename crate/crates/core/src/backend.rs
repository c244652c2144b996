//! Simulated backend fleet: a coupling map paired with a crosstalk profile.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{CrosstalkProfile, SimError};
use crate::topology::{grid_topology, heavy_hex_preset, CouplingMap, TopologyError};

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("unknown backend profile `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Profile(#[from] SimError),
    #[error("failed to read backend profile: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse backend profile: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendProfile {
    pub label: String,
    /// Processor family; profiles in one family share every parameter.
    pub family: String,
    pub coupling_map: CouplingMap,
    pub crosstalk: CrosstalkProfile,
}

/// `(label, family)` of every shipped profile.
pub const PRESETS: &[(&str, &str)] = &[
    ("heron-like-A", "heron"),
    ("heron-like-B", "heron"),
    ("heron-like-C", "heron"),
    ("heron-r3-like-A", "heron-r3"),
    ("heron-r3-like-B", "heron-r3"),
    ("heron-r1-like", "heron-r1"),
    ("nighthawk-like", "nighthawk"),
];

fn family_parameters(family: &str) -> Result<(CouplingMap, CrosstalkProfile), BackendError> {
    let base = CrosstalkProfile::default();
    Ok(match family {
        "heron" => (heavy_hex_preset("heavyhex-27")?, base),
        "heron-r3" => (
            heavy_hex_preset("heavyhex-27")?,
            CrosstalkProfile { zz_strength: 0.75 * base.zz_strength, depol_2q: 0.004, ..base },
        ),
        "heron-r1" => (
            heavy_hex_preset("heavyhex-27")?,
            CrosstalkProfile { zz_strength: 1.5 * base.zz_strength, depol_2q: 0.008, ..base },
        ),
        "nighthawk" => (grid_topology(6, 6), CrosstalkProfile { zz_strength: 2.0 * base.zz_strength, ..base }),
        other => return Err(BackendError::Unknown(other.to_string())),
    })
}

impl BackendProfile {
    pub fn preset(label: &str) -> Result<Self, BackendError> {
        let &(label, family) = PRESETS
            .iter()
            .find(|(l, _)| l.eq_ignore_ascii_case(label))
            .ok_or_else(|| BackendError::Unknown(label.to_string()))?;
        let (coupling_map, crosstalk) = family_parameters(family)?;
        Ok(Self { label: label.to_string(), family: family.to_string(), coupling_map, crosstalk })
    }

    /// A preset label, or a path to a profile JSON file.
    pub fn resolve(name_or_path: &str) -> Result<Self, BackendError> {
        match Self::preset(name_or_path) {
            Ok(p) => Ok(p),
            Err(BackendError::Unknown(_)) if Path::new(name_or_path).is_file() => Self::load(name_or_path),
            Err(e) => Err(e),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let profile: BackendProfile = serde_json::from_str(&fs::read_to_string(path)?)?;
        profile.crosstalk.validate()?;
        Ok(profile)
    }

    /// Same device and family with every noise source switched off.
    pub fn noiseless(&self) -> Self {
        Self { label: format!("{}-noiseless", self.label), crosstalk: CrosstalkProfile::noiseless(), ..self.clone() }
    }
}

impl Default for BackendProfile {
    fn default() -> Self {
        Self::preset("heron-like-A").expect("built-in preset")
    }
}
