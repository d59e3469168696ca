//! Run configuration: one flat JSON document per run.
//!
//! ```json
//! {
//!   "mode": "sequence-sim",
//!   "master_seed": 7,
//!   "replications": 1000,
//!   "out": "out/example1",
//!   "problem": { "lambda": {"kind": "power", "nu": 1}, "...": "..." },
//!   "rules": {"kappa": 0.75, "lepski_denominator": "s"}
//! }
//! ```
//!
//! `levy-experiment` takes an `experiment` object instead of `problem`.
//! A manifest written by a previous run is accepted as a config too; its
//! embedded `run_config` is used.

use std::path::PathBuf;

use quasiopt::config::ProblemDocument;
use quasiopt::levy::LevyConfig;
use quasiopt::selection::RuleOptions;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const MAX_REPLICATIONS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SequenceSim,
    TheoryReport,
    LevyExperiment,
    CheckAssumptions,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::SequenceSim,
        Mode::TheoryReport,
        Mode::LevyExperiment,
        Mode::CheckAssumptions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::SequenceSim => "sequence-sim",
            Mode::TheoryReport => "theory-report",
            Mode::LevyExperiment => "levy-experiment",
            Mode::CheckAssumptions => "check-assumptions",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

fn default_replications() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Output directory; not part of the recorded configuration.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<RuleOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<LevyConfig>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.replications == 0 || self.replications > MAX_REPLICATIONS {
            return Err(CliError::Config(format!(
                "replications = {} out of range 1..={MAX_REPLICATIONS}",
                self.replications
            )));
        }
        let needs_problem = matches!(
            self.mode,
            Mode::SequenceSim | Mode::TheoryReport | Mode::CheckAssumptions
        );
        if needs_problem && self.problem.is_none() {
            return Err(CliError::Config(format!(
                "mode {} requires \"problem\"",
                self.mode.name()
            )));
        }
        if !needs_problem && self.problem.is_some() {
            return Err(CliError::Config(format!(
                "mode {} takes no \"problem\"",
                self.mode.name()
            )));
        }
        if self.mode != Mode::LevyExperiment && self.experiment.is_some() {
            return Err(CliError::Config(format!(
                "mode {} takes no \"experiment\"",
                self.mode.name()
            )));
        }
        if let Some(r) = &self.rules {
            if !(r.kappa.is_finite() && r.kappa > 0.0) {
                return Err(CliError::Config(format!("kappa = {} must be positive", r.kappa)));
            }
        }
        if let Some(e) = &self.experiment {
            e.validate()?;
        }
        Ok(())
    }

    pub fn rules(&self) -> RuleOptions {
        self.rules.unwrap_or_default()
    }

    pub fn experiment(&self) -> LevyConfig {
        self.experiment.clone().unwrap_or_default()
    }

    /// Canonical JSON of the configuration, as hashed into the manifest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }
}

/// Parses a run configuration or a previous run's manifest.
pub fn parse_run_config(text: &str) -> Result<RunConfig, CliError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if !value.is_object() {
        return Err(CliError::Config("configuration must be a JSON object".into()));
    }
    if value.get("config_sha256").is_some() {
        value = value
            .get("run_config")
            .cloned()
            .ok_or_else(|| CliError::Config("manifest has no \"run_config\"".into()))?;
    }
    match value.get("mode") {
        None => return Err(CliError::Config("missing \"mode\"".into())),
        Some(Value::String(m)) if Mode::parse(m).is_some() => {}
        Some(other) => return Err(CliError::Config(format!("unknown mode {other}"))),
    }
    let cfg: RunConfig = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
