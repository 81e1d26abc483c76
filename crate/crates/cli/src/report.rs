use std::collections::BTreeMap;

use ncinterp_core::pisier::CorollaryReport;
use ncinterp_core::szego::Certificate;
use ncinterp_core::variational::NormEstimate;
use ncinterp_core::{Config, Exponent};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub d: usize,
    pub n: usize,
    pub p: Option<Exponent>,
    pub theta: Option<f64>,
    pub seed: u64,
}

/// One checked inequality: `value` against `bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_owned(),
            value,
            bound,
            passed: value <= bound,
        }
    }

    /// Passes when `value == bound` exactly.
    pub fn equal(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_owned(),
            value,
            bound,
            passed: value == bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub instance: Instance,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// Method for `compute`, suite for `verify`.
    pub mode: String,
    pub instance: Instance,
    pub config: Config,
    pub estimates: BTreeMap<String, NormEstimate>,
    pub gaps: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trials: Vec<Trial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary: Option<CorollaryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Wall-clock seconds per phase; only recorded on request, so that
    /// reports stay reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, mode: &str, instance: Instance, config: Config) -> Self {
        Self {
            command: command.to_owned(),
            mode: mode.to_owned(),
            instance,
            config,
            estimates: BTreeMap::new(),
            gaps: BTreeMap::new(),
            checks: Vec::new(),
            trials: Vec::new(),
            corollary: None,
            certificate: None,
            timings: None,
            passed: true,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub(crate) fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.passed) && self.trials.iter().all(|t| t.passed);
    }
}
