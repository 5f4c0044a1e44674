//! JSON scenario files and the bundled canned scenarios.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attacks::AttackStrategy;
use crate::engine::{Countermeasures, ReceiverSpec, Scenario};
use crate::error::Error;

pub const SCHEMA_VERSION: &str = "1";

/// On-disk form of a [`Scenario`]: the same fields plus `schema_version`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: String,
    pub receiver: ReceiverSpec,
    pub attack: AttackStrategy,
    #[serde(default)]
    pub countermeasures: Countermeasures,
    pub n_pulses: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub channel_transmittance: f64,
    #[serde(default = "one")]
    pub eve_loss_mask: f64,
    #[serde(default = "one")]
    pub naive_rate: f64,
}

fn one() -> f64 {
    1.0
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        Scenario {
            receiver: f.receiver,
            attack: f.attack,
            countermeasures: f.countermeasures,
            n_pulses: f.n_pulses,
            seed: f.seed,
            channel_transmittance: f.channel_transmittance,
            eve_loss_mask: f.eve_loss_mask,
            naive_rate: f.naive_rate,
        }
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            schema_version: SCHEMA_VERSION.to_string(),
            receiver: s.receiver.clone(),
            attack: s.attack.clone(),
            countermeasures: s.countermeasures,
            n_pulses: s.n_pulses,
            seed: s.seed,
            channel_transmittance: s.channel_transmittance,
            eve_loss_mask: s.eve_loss_mask,
            naive_rate: s.naive_rate,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version `{0}` (expected `{SCHEMA_VERSION}`)")]
    Schema(String),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] Error),
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, LoadError> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(LoadError::Schema(file.schema_version));
    }
    let scenario = Scenario::from(file);
    scenario.validate()?;
    Ok(scenario)
}

pub fn to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from(s)).expect("scenario serializes")
}

/// Canned scenarios shipped with the crate, by name.
pub const CANNED: &[(&str, &str)] = &[
    ("timeshift_r0", include_str!("../scenarios/timeshift_r0.json")),
    ("fakedstate_r02", include_str!("../scenarios/fakedstate_r02.json")),
    ("timemux_flip", include_str!("../scenarios/timemux_flip.json")),
    ("timemux_wrap", include_str!("../scenarios/timemux_wrap.json")),
    ("probe_r05", include_str!("../scenarios/probe_r05.json")),
    ("fourvalue_defense", include_str!("../scenarios/fourvalue_defense.json")),
];

pub fn canned(name: &str) -> Option<&'static str> {
    CANNED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Loads a scenario from a file path, falling back to a canned scenario of
/// that name when no such file exists.
pub fn load_scenario(path_or_name: &str) -> Result<Scenario, LoadError> {
    let path = Path::new(path_or_name);
    if !path.exists() {
        if let Some(text) = canned(path_or_name) {
            return parse_scenario(text);
        }
    }
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path_or_name.to_string(),
        source,
    })?;
    parse_scenario(&text)
}
