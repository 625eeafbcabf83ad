use serde::{Deserialize, Serialize};

use super::canon::{canon, terms};
use super::chart::Chart;
use super::eval::eval;
use super::expr::Expr;
use crate::error::{Error, Result};

/// Which tier of the zero test decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionPath {
    Symbolic,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroTest {
    Zero { path: DecisionPath },
    NonZero { point: Vec<f64>, value: f64 },
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroTest::Zero { .. })
    }
}

/// Two-tier zero test: exact canonical form first, then seeded sampling on the chart box.
///
/// A sample passes when `|e(p)| <= eps_abs + eps_rel * scale`, where `scale` is the largest
/// magnitude of any single canonical term over all usable samples. Points where evaluation
/// hits a domain violation are skipped.
pub fn is_zero(e: &Expr, chart: &Chart) -> Result<ZeroTest> {
    let c = canon(e);
    if c.is_literal_zero() {
        return Ok(ZeroTest::Zero { path: DecisionPath::Symbolic });
    }
    let parts = terms(&c);
    let mut values = Vec::new();
    let mut scale: f64 = 0.0;
    'points: for p in chart.sample_points() {
        let mut sum = 0.0;
        let mut local: f64 = 0.0;
        for t in &parts {
            match eval(t, p) {
                Ok(v) => {
                    sum += v;
                    local = local.max(v.abs());
                }
                Err(Error::Domain { .. }) => continue 'points,
                Err(other) => return Err(other),
            }
        }
        scale = scale.max(local);
        values.push((p, sum));
    }
    if values.is_empty() {
        return Err(Error::Undecidable { expr: truncate(&c.to_string()) });
    }
    let s = chart.sampling();
    let tol = s.eps_abs + s.eps_rel * scale;
    let worst = values
        .iter()
        .filter(|(_, v)| !(v.abs() <= tol))
        .fold(None::<&(&Vec<f64>, f64)>, |best, cur| match best {
            Some(b) if b.1.abs() >= cur.1.abs() => Some(b),
            _ => Some(cur),
        });
    Ok(match worst {
        None => ZeroTest::Zero { path: DecisionPath::Probabilistic },
        Some((p, v)) => ZeroTest::NonZero { point: (*p).clone(), value: *v },
    })
}

pub(crate) fn truncate(s: &str) -> String {
    const MAX: usize = 240;
    if s.len() <= MAX {
        s.to_string()
    } else {
        let mut cut = MAX;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        format!("{}...", &s[..cut])
    }
}
