#![allow(dead_code)]

use std::sync::Arc;

use cartan_core::algebroid::{build_action_algebroid, Algebroid, LieAlgebra};
use cartan_core::bundles::{Section, Slot, TensorField};
use cartan_core::symcore::{eval, parse_expr, rational, Chart, Expr};

/// Chart with bounds given as `(num, den)` pairs for each end.
pub fn chart(names: &[&str], bounds: &[((i64, i64), (i64, i64))]) -> Arc<Chart> {
    let b = bounds.iter().map(|&((a, b), (c, d))| (rational(a, b), rational(c, d))).collect();
    Arc::new(Chart::new(names, b).unwrap())
}

pub fn sphere_chart() -> Arc<Chart> {
    chart(&["th", "ph"], &[((1, 2), (5, 2)), ((0, 1), (3, 1))])
}

pub fn ex(chart: &Chart, s: &str) -> Expr {
    parse_expr(s, chart).unwrap()
}

pub fn sec(chart: &Chart, comps: &[&str]) -> Section {
    Section::parse(chart, comps).unwrap()
}

pub fn matrix(chart: &Chart, rows: &[&[&str]]) -> Vec<Vec<Expr>> {
    rows.iter().map(|r| r.iter().map(|s| ex(chart, s)).collect()).collect()
}

pub fn tensor(chart: &Chart, slots: Vec<Slot>, dims: Vec<usize>, comps: &[&str]) -> TensorField {
    TensorField::new(slots, dims, comps.iter().map(|s| ex(chart, s)).collect()).unwrap()
}

pub fn metric(chart: &Chart, comps: &[&str]) -> TensorField {
    let n = chart.dim();
    tensor(chart, vec![Slot::LOW_TM, Slot::LOW_TM], vec![n, n], comps)
}

pub fn bivector(chart: &Chart, comps: &[&str]) -> TensorField {
    let n = chart.dim();
    tensor(chart, vec![Slot::UP_TM, Slot::UP_TM], vec![n, n], comps)
}

pub fn at(e: &Expr, p: &[f64]) -> f64 {
    eval(e, p).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Numeric agreement of two expressions over the chart samples.
pub fn agree(chart: &Chart, a: &Expr, b: &Expr) -> bool {
    chart.sample_points().iter().all(|p| close(at(a, p), at(b, p), 1e-9))
}

pub fn r3() -> Arc<Chart> {
    chart(&["x1", "x2", "x3"], &[((-1, 1), (1, 1)); 3])
}

pub fn so3_fields(chart: &Chart) -> Vec<Section> {
    vec![sec(chart, &["0", "x3", "-x2"]), sec(chart, &["-x3", "0", "x1"]), sec(chart, &["x2", "-x1", "0"])]
}

pub fn so3_action() -> Algebroid {
    let c = r3();
    let f = so3_fields(&c);
    build_action_algebroid(c, &LieAlgebra::so3(), &f).unwrap()
}
