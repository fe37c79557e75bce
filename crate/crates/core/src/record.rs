//! Per-run results shared by the GA, the local search and the harness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genetic::GaConfig;
use crate::model::Objectives;
use crate::pareto::Archive;

/// The five algorithm configurations compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "MOLSD")]
    Molsd,
    #[serde(rename = "PMX")]
    Pmx,
    #[serde(rename = "OBX")]
    Obx,
    #[serde(rename = "UOBX")]
    Uobx,
    /// UOBX followed by swap mutation.
    #[serde(rename = "UOBX^2EX")]
    UobxSwap,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Molsd,
        Algorithm::Pmx,
        Algorithm::Obx,
        Algorithm::Uobx,
        Algorithm::UobxSwap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Molsd => "MOLSD",
            Algorithm::Pmx => "PMX",
            Algorithm::Obx => "OBX",
            Algorithm::Uobx => "UOBX",
            Algorithm::UobxSwap => "UOBX^2EX",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MOLSD" => Ok(Algorithm::Molsd),
            "PMX" => Ok(Algorithm::Pmx),
            "OBX" => Ok(Algorithm::Obx),
            "UOBX" => Ok(Algorithm::Uobx),
            "UOBX^2EX" | "UOBX2EX" | "UOBX+2EX" | "UOBX-2EX" => Ok(Algorithm::UobxSwap),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub objectives: Objectives,
    pub chromosome: String,
}

/// Outcome of one seeded solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// GA settings; absent for the local search.
    pub config: Option<GaConfig>,
    /// Number of decode-and-evaluate calls.
    pub evaluations: u64,
    /// GA iterations, or neighborhood expansions for the local search.
    pub iterations: u64,
    /// Seconds; the only field allowed to differ between identical runs.
    pub wall_time: f64,
    pub archive: Vec<RecordEntry>,
    /// Set when the run failed; the archive is then empty.
    pub error: Option<String>,
}

impl RunRecord {
    pub(crate) fn archive_entries(archive: &Archive) -> Vec<RecordEntry> {
        archive
            .entries()
            .iter()
            .map(|e| RecordEntry {
                objectives: *e.objectives(),
                chromosome: e.chromosome.to_string(),
            })
            .collect()
    }

    pub fn failed(instance: &str, algorithm: Algorithm, seed: u64, error: &Error) -> Self {
        Self {
            instance: instance.to_string(),
            algorithm,
            seed,
            config: None,
            evaluations: 0,
            iterations: 0,
            wall_time: 0.0,
            archive: Vec::new(),
            error: Some(error.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn front(&self) -> Vec<Objectives> {
        self.archive.iter().map(|e| e.objectives).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Copy with the wall time zeroed, for reproducibility comparisons.
    pub fn without_wall_time(&self) -> Self {
        Self {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}
