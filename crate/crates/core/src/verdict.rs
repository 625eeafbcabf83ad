use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symcore::{is_zero, Chart, DecisionPath, Expr, ZeroTest};

/// A sample point and component at which a claimed identity numerically fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub component: Vec<usize>,
    pub value: f64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "value {:e} at point {:?}", self.value, self.point)?;
        if !self.component.is_empty() {
            write!(f, ", component {:?}", self.component)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecidable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub path: DecisionPath,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<Verdict>,
}

impl Verdict {
    pub fn pass(name: impl Into<String>) -> Verdict {
        Verdict {
            name: name.into(),
            status: Status::Pass,
            path: DecisionPath::Symbolic,
            witness: None,
            note: None,
            checks: Vec::new(),
        }
    }

    pub fn fail(name: impl Into<String>, witness: Option<Witness>, note: Option<String>) -> Verdict {
        Verdict { status: Status::Fail, witness, note, ..Verdict::pass(name) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.note = Some(note.into());
        self
    }

    /// Conjunction of sub-verdicts: fail if any fails, else undecidable if any is,
    /// else pass. The first failing sub-verdict's witness is lifted.
    pub fn all(name: impl Into<String>, checks: Vec<Verdict>) -> Verdict {
        let mut v = Verdict::pass(name);
        for c in &checks {
            v.path = v.path.max(c.path);
            match c.status {
                Status::Fail if v.status != Status::Fail => {
                    v.status = Status::Fail;
                    v.witness = c.witness.clone();
                }
                Status::Undecidable if v.status == Status::Pass => v.status = Status::Undecidable,
                _ => {}
            }
        }
        v.checks = checks;
        v
    }

    /// Require a pass: a failure becomes `err(witness)`, an undecidable result becomes
    /// [`Error::Undecidable`].
    pub fn require(self, err: impl FnOnce(Witness) -> Error) -> Result<Verdict> {
        match self.status {
            Status::Pass => Ok(self),
            Status::Fail => Err(err(self.witness.unwrap_or(Witness { point: Vec::new(), component: Vec::new(), value: f64::NAN }))),
            Status::Undecidable => Err(Error::Undecidable { expr: self.note.unwrap_or(self.name) }),
        }
    }

    /// Find a sub-verdict by name, depth first.
    pub fn find(&self, name: &str) -> Option<&Verdict> {
        if self.name == name {
            return Some(self);
        }
        self.checks.iter().find_map(|c| c.find(name))
    }
}

/// Accumulates is_zero checks on many components into one verdict. Stops testing
/// after the first nonzero component.
pub struct ZeroCheck<'a> {
    chart: &'a Chart,
    verdict: Verdict,
}

impl<'a> ZeroCheck<'a> {
    pub fn new(name: impl Into<String>, chart: &'a Chart) -> ZeroCheck<'a> {
        ZeroCheck { chart, verdict: Verdict::pass(name) }
    }

    /// Test one component; returns whether it was zero.
    pub fn check(&mut self, component: &[usize], e: &Expr) -> bool {
        if self.verdict.status == Status::Fail {
            return false;
        }
        match is_zero(e, self.chart) {
            Ok(ZeroTest::Zero { path }) => {
                self.verdict.path = self.verdict.path.max(path);
                true
            }
            Ok(ZeroTest::NonZero { point, value }) => {
                self.verdict.status = Status::Fail;
                self.verdict.path = DecisionPath::Probabilistic;
                self.verdict.witness = Some(Witness { point, component: component.to_vec(), value });
                false
            }
            Err(err) => {
                self.verdict.status = Status::Undecidable;
                if self.verdict.note.is_none() {
                    self.verdict.note = Some(format!("component {:?}: {}", component, err));
                }
                false
            }
        }
    }

    pub fn failed(&self) -> bool {
        self.verdict.status == Status::Fail
    }

    pub fn finish(self) -> Verdict {
        self.verdict
    }

    /// Convert a failure into the given error, otherwise return the verdict.
    pub fn finish_or(self, err: impl FnOnce(Witness) -> Error) -> Result<Verdict> {
        let v = self.verdict;
        match (&v.status, &v.witness) {
            (Status::Fail, Some(w)) => Err(err(w.clone())),
            _ => Ok(v),
        }
    }
}
