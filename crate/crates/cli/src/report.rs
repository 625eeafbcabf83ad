use serde::Serialize;
use serde_json::Value;

use cartan_core::symcore::DecisionPath;
use cartan_core::{Status, Verdict, Witness};

use crate::error::InputError;

pub const TOOL: &str = "cartan";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Undecidable,
    Error,
}

/// One top-level check. Sub-verdicts are reported as produced by the core library.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub path: DecisionPath,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Wall time, only recorded with `--timings` so that reports stay byte-stable.
    pub elapsed_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Verdict>,
}

impl CheckReport {
    pub fn from_verdict(name: impl Into<String>, v: Verdict) -> CheckReport {
        CheckReport {
            name: name.into(),
            status: v.status,
            path: v.path,
            witness: v.witness,
            note: v.note,
            elapsed_ms: None,
            data: None,
            checks: v.checks,
        }
    }

    pub fn with_data(mut self, data: Value) -> CheckReport {
        self.data = Some(data);
        self
    }

    /// Depth-first search through the sub-verdicts.
    pub fn find(&self, name: &str) -> Option<&Verdict> {
        self.checks.iter().find_map(|c| c.find(name))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub status: Outcome,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<InputError>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, samples: usize, tol: f64) -> Report {
        Report {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            document: None,
            seed,
            samples,
            tol,
            status: Outcome::Pass,
            checks: Vec::new(),
            error: None,
        }
    }

    pub fn finish(mut self, result: Result<Vec<CheckReport>, InputError>) -> Report {
        match result {
            Ok(checks) => {
                self.status = if checks.iter().any(|c| c.status == Status::Fail) {
                    Outcome::Fail
                } else if checks.iter().any(|c| c.status == Status::Undecidable) {
                    Outcome::Undecidable
                } else {
                    Outcome::Pass
                };
                self.checks = checks;
            }
            Err(e) => {
                self.status = Outcome::Error;
                self.error = Some(e);
            }
        }
        self
    }

    /// 0 on pass, 1 when a verdict fails or stays undecided, 2 on input errors.
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Outcome::Pass => 0,
            Outcome::Fail | Outcome::Undecidable => 1,
            Outcome::Error => 2,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self, pretty: bool) -> String {
        let s = if pretty { serde_json::to_string_pretty(self) } else { serde_json::to_string(self) };
        s.expect("report serializes")
    }
}
