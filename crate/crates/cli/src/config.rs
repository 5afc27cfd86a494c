use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Pst,
    Wavepacket,
    Ladder,
    Memory,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [Self::Pst, Self::Wavepacket, Self::Ladder, Self::Memory];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pst => "pst",
            Self::Wavepacket => "wavepacket",
            Self::Ladder => "ladder",
            Self::Memory => "memory",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "empty_object")]
    pub parameters: Value,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Recorded in the manifest; every computation is deterministic.
    #[serde(default)]
    pub seed: u64,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text)?;
        if !cfg.parameters.is_object() {
            return Err(CliError::Validation("`parameters` must be a JSON object".into()));
        }
        Ok(cfg)
    }
}
