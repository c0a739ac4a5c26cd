//! JSON scenario configuration.
//!
//! Keys mirror the [`Scenario`] fields. Parsing is strict: an unknown key
//! anywhere in the document is an error naming that key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CoilPair, LossModel, Scenario};
use crate::schedules::Schedule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Directory for output files; the working directory when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub svg: bool,
    /// Fill the adiabatic diagnostic columns.
    #[serde(default = "yes")]
    pub diagnostics: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self { dir: None, svg: false, diagnostics: true }
    }
}

fn yes() -> bool {
    true
}
fn default_rel_tol() -> f64 {
    Scenario::DEFAULT_REL_TOL
}
fn default_abs_tol() -> f64 {
    Scenario::DEFAULT_ABS_TOL
}
fn default_samples() -> usize {
    Scenario::DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub schedule: Schedule,
    #[serde(default)]
    pub losses: LossModel,
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default)]
    pub initial: CoilPair,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    #[serde(default)]
    pub output: OutputOptions,
}

impl ConfigDocument {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self {
            schedule: scenario.schedule.clone(),
            losses: scenario.losses,
            t_start: scenario.t_start,
            t_end: scenario.t_end,
            initial: scenario.initial,
            rel_tol: scenario.rel_tol,
            abs_tol: scenario.abs_tol,
            sample_count: scenario.sample_count,
            output: OutputOptions::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config documents always serialize")
    }

    /// Validated scenario; physical-domain failures are reported as config errors.
    pub fn scenario(&self) -> Result<Scenario> {
        let scenario = Scenario {
            schedule: self.schedule.clone(),
            losses: self.losses,
            t_start: self.t_start,
            t_end: self.t_end,
            initial: self.initial,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            sample_count: self.sample_count,
        };
        scenario.validate().map_err(|e| match e {
            Error::Domain(msg) => Error::Config(msg),
            other => other,
        })?;
        Ok(scenario)
    }
}
