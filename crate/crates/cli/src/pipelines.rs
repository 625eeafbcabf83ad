//! Verification pipelines over a built [`Geometry`].

use std::time::Instant;

use serde_json::json;

use cartan_core::algebroid::Algebroid;
use cartan_core::cartan::*;
use cartan_core::connections::{check_anchor_equivariance, curvature_tm, induced_rep_on_g, Bundle, TMConnection};
use cartan_core::jet::splitting_curvature_full;
use cartan_core::random::{random_flat_rep, random_g_connection, random_one_form, random_section, rng};
use cartan_core::symcore::canon;
use cartan_core::{Error, Status, Verdict};

use crate::document::Pipeline;
use crate::error::InputError;
use crate::geometry::Geometry;
use crate::report::CheckReport;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub timings: bool,
    /// Random one-forms per instance in the identities battery.
    pub forms: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, timings: false, forms: 10 }
    }
}

#[derive(Clone, Debug)]
pub struct HolonomyArgs {
    pub point: Vec<f64>,
    pub plane: (usize, usize),
    pub side: f64,
    pub connection: Option<String>,
    pub steps: usize,
    pub max_rel_error: f64,
}

/// An algebroid with a connection on it, declared in the document or derived from it.
pub struct Instance {
    pub label: String,
    /// Where the connection comes from, for error messages.
    pub source: String,
    pub g: Algebroid,
    pub conn: TMConnection,
}

fn timed(opts: &RunOptions, f: impl FnOnce() -> Result<CheckReport, InputError>) -> Result<CheckReport, InputError> {
    let start = Instant::now();
    let mut r = f()?;
    if opts.timings {
        r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(r)
}

/// Undecidable zero tests become undecidable verdicts; anything else is an input problem.
fn decide(name: &str, path: &str, r: cartan_core::Result<Verdict>) -> Result<Verdict, InputError> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::Undecidable { expr }) => Ok(Verdict { status: Status::Undecidable, note: Some(expr), ..Verdict::pass(name) }),
        Err(e) => Err(InputError::core(path, e)),
    }
}

fn renamed(mut v: Verdict, name: &str) -> Verdict {
    v.name = name.into();
    v
}

fn core<T>(path: &str, r: cartan_core::Result<T>) -> Result<T, InputError> {
    r.map_err(|e| InputError::core(path, e))
}

/// Declared connections, then the reductive connection of the isometry algebroid
/// and the flat connection of the parallelism when those objects are present.
pub fn instances(geo: &Geometry) -> Result<Vec<Instance>, InputError> {
    let mut out = Vec::new();
    for c in &geo.connections {
        out.push(Instance {
            label: format!("{}/{}", c.on, c.name),
            source: format!("/connections/{}", c.name),
            g: geo.algebroid(&c.on).clone(),
            conn: c.conn.clone(),
        });
    }
    if let Some(m) = &geo.metric {
        let iso = core("/metric", isometry_algebroid(geo.chart.clone(), &m.sigma, m.h_frame.as_deref()))?;
        let conn = core("/metric", reductive_connection(&iso.algebroid, &iso.splitting(), &iso.rep_tm))?;
        out.push(Instance { label: "isometry/reductive".into(), source: "/metric".into(), g: iso.algebroid, conn });
    }
    if let Some(p) = &geo.parallelism {
        out.push(Instance {
            label: "tangent/parallelism".into(),
            source: "/parallelism".into(),
            g: geo.algebroid("tangent").clone(),
            conn: p.connection().with_target(Bundle::Algebroid),
        });
    }
    Ok(out)
}

fn require_instances(geo: &Geometry, pipeline: &str) -> Result<Vec<Instance>, InputError> {
    let all = instances(geo)?;
    if all.is_empty() {
        return Err(InputError::new("/connections", format!("pipeline {} needs a connection, a metric or a parallelism", pipeline)));
    }
    Ok(all)
}

pub fn validate(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    let mut out = Vec::new();
    for (name, g) in geo.algebroids_in_order() {
        if name == "tangent" {
            continue;
        }
        out.push(timed(opts, || {
            let orbits = core(&format!("/{}", name), g.orbit_report())?;
            let mut ranks = orbits.ranks.clone();
            ranks.sort_unstable();
            ranks.dedup();
            let data = json!({ "rank": g.rank(), "orbit_ranks": ranks, "transitive": orbits.transitive, "regular": orbits.regular });
            Ok(CheckReport::from_verdict(format!("algebroid[{}]", name), g.validate()).with_data(data))
        })?);
    }
    if let Some(m) = &geo.metric {
        out.push(timed(opts, || {
            let mut checks = Vec::new();
            match metric_matrix(&geo.chart, &m.sigma) {
                Ok(s) => {
                    checks.push(Verdict::pass("symmetric"));
                    checks.push(match cartan_core::symcore::matrix::inverse(&s) {
                        Ok(_) => Verdict::pass("invertible"),
                        Err(e) => Verdict::fail("invertible", None, Some(e.to_string())),
                    });
                    if let Some(h) = &m.h_frame {
                        checks.push(match check_skew(&geo.chart, &s, h) {
                            Ok(()) => Verdict::pass("h_frame_skew"),
                            Err(Error::NotSkew { index, witness }) => {
                                Verdict::fail("h_frame_skew", Some(witness), Some(format!("h_frame[{}]", index)))
                            }
                            Err(e) => return Err(InputError::core("/h_frame", e)),
                        });
                    }
                }
                Err(Error::DegenerateMetric(w)) => checks.push(Verdict::fail("symmetric", Some(w), None)),
                Err(e) => return Err(InputError::core("/metric", e)),
            }
            if !m.killing.is_empty() {
                checks.push(decide("killing", "/killing_fields", killing_check(&geo.chart, &m.sigma, &m.killing))?);
            }
            Ok(CheckReport::from_verdict("metric", Verdict::all("metric", checks)))
        })?);
    }
    if let Some(p) = &geo.parallelism {
        out.push(timed(opts, || {
            let zero = p.curvature().all_zero("curvature_zero", &geo.chart);
            let data = json!({ "maurer_cartan": zero.passed() });
            Ok(CheckReport::from_verdict("parallelism", Verdict::all("parallelism", vec![Verdict::pass("invertible")])).with_data(data))
        })?);
    }
    for c in &geo.connections {
        out.push(timed(opts, || {
            let path = format!("/connections/{}", c.name);
            core(&path, c.conn.check_on(geo.algebroid(&c.on)))?;
            Ok(CheckReport::from_verdict(format!("connection[{}]", c.name), Verdict::pass("shape")).with_data(json!({ "on": c.on })))
        })?);
    }
    Ok(out)
}

pub fn check(geo: &Geometry, pipeline: Pipeline, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    match pipeline {
        Pipeline::Cartan => cartan(geo, opts),
        Pipeline::TheoremA => theorem_a(geo, opts),
        Pipeline::Transitive => transitive(geo, opts),
        Pipeline::Riemann => riemann(geo, opts),
        Pipeline::Poisson => poisson(geo, opts),
        Pipeline::Geometry => geometry(geo, opts),
    }
}

fn cartan(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    require_instances(geo, "cartan")?
        .into_iter()
        .map(|inst| {
            timed(opts, || {
                let p = inst.source.as_str();
                let checks = vec![
                    renamed(inst.g.validate(), "algebroid_axioms"),
                    decide("oracle_agreement", p, oracle_agreement(&inst.g, &inst.conn))?,
                    decide("cartan", p, check_cartan(&inst.g, &inst.conn))?,
                ];
                Ok(CheckReport::from_verdict(format!("cartan[{}]", inst.label), Verdict::all("cartan", checks)))
            })
        })
        .collect()
}

fn theorem_a(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    require_instances(geo, "theorem-a")?
        .into_iter()
        .map(|inst| {
            timed(opts, || {
                let a = core(&inst.source, theorem_a_verdict(&inst.g, &inst.conn))?;
                let data = json!({ "classification": a.classification });
                Ok(CheckReport::from_verdict(format!("theorem_a[{}]", inst.label), a.verdict).with_data(data))
            })
        })
        .collect()
}

fn transitive(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    require_instances(geo, "transitive")?
        .into_iter()
        .map(|inst| {
            timed(opts, || {
                let p = inst.source.as_str();
                let cartan = decide("cartan", p, check_cartan(&inst.g, &inst.conn))?;
                let parallel = decide("torsion_parallel", p, transitive_symmetry_check(&inst.g, &inst.conn))?;
                let flat = curvature_tm(&inst.conn).all_zero("flat", inst.g.chart());
                // for a Cartan connection, flatness and parallel torsion must coincide
                let agree = match (cartan.status, flat.status, parallel.status) {
                    (Status::Pass, a, b) if a != Status::Undecidable && b != Status::Undecidable && a != b => Verdict::fail(
                        "agrees_with_flatness",
                        None,
                        Some(format!("flat {:?}, torsion parallel {:?}", a, b)),
                    ),
                    _ => Verdict::pass("agrees_with_flatness"),
                };
                let mut v = Verdict::all("transitive", vec![cartan, parallel, agree]);
                v.checks.push(flat);
                v.note = Some(if v.passed() { "locally_symmetric" } else { "not_established" }.into());
                Ok(CheckReport::from_verdict(format!("transitive[{}]", inst.label), v))
            })
        })
        .collect()
}

fn riemann(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    let m = geo.metric.as_ref().ok_or_else(|| InputError::new("/metric", "pipeline riemann needs a metric"))?;
    let r = timed(opts, || {
        let ro = RiemannOptions { h_frame: m.h_frame.as_deref(), killing: &m.killing };
        let rep = core("/metric", riemann_pipeline(geo.chart.clone(), &m.sigma, &ro))?;
        let data = json!({ "classification": rep.classification, "isometry_rank": rep.isometry.algebroid.rank() });
        Ok(CheckReport::from_verdict("riemann", rep.verdict).with_data(data))
    })?;
    Ok(vec![r])
}

/// The affine connection dual to a connection on the cotangent algebroid.
fn affine_from_cotangent(conn: &TMConnection) -> TMConnection {
    let n = conn.dim();
    let gamma = (0..n).map(|i| (0..n).map(|a| (0..n).map(|b| canon(&-conn.g(i, b, a))).collect()).collect()).collect();
    TMConnection::new(Bundle::Tangent, gamma).expect("square")
}

fn poisson(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    let pi = geo.poisson.as_ref().ok_or_else(|| InputError::new("/poisson", "pipeline poisson needs a Poisson bivector"))?;
    let conns: Vec<_> = geo.connections.iter().filter(|c| c.on == "poisson").collect();
    if conns.is_empty() {
        return Err(InputError::new("/connections", "pipeline poisson needs a connection on `poisson`"));
    }
    conns
        .into_iter()
        .map(|c| {
            timed(opts, || {
                let affine = affine_from_cotangent(&c.conn);
                let rep = core(&format!("/connections/{}", c.name), poisson_report(geo.chart.clone(), pi, &affine))?;
                Ok(CheckReport::from_verdict(format!("poisson[{}]", c.name), rep.verdict))
            })
        })
        .collect()
}

fn geometry(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    let p = geo.parallelism.as_ref().ok_or_else(|| InputError::new("/parallelism", "pipeline geometry needs a parallelism"))?;
    let r = timed(opts, || {
        let rep = core("/parallelism", parallelism_report(p))?;
        let data = json!({ "maurer_cartan": rep.verdict.find("curvature_zero").is_some_and(|v| v.passed()) });
        Ok(CheckReport::from_verdict("geometry", rep.verdict).with_data(data))
    })?;
    Ok(vec![r])
}

pub fn holonomy(geo: &Geometry, args: &HolonomyArgs, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    let (label, conn) = match &args.connection {
        Some(name) => {
            let c = geo
                .connections
                .iter()
                .find(|c| &c.name == name)
                .ok_or_else(|| InputError::new("--connection", format!("unresolved connection `{}`", name)))?;
            (c.name.clone(), c.conn.clone())
        }
        None => match (&geo.metric, geo.connections.first()) {
            (Some(m), _) => ("levi_civita".to_string(), core("/metric", levi_civita(&geo.chart, &m.sigma))?),
            (None, Some(c)) => (c.name.clone(), c.conn.clone()),
            (None, None) => return Err(InputError::new("/connections", "holonomy needs a connection or a metric")),
        },
    };
    let r = timed(opts, || {
        let ho = HolonomyOptions { steps: args.steps };
        let res = holonomy_check(&geo.chart, &conn, &args.point, args.plane, args.side, &ho).map_err(|e| match e {
            Error::LoopOutsideBox => InputError::new("--point", e.to_string()),
            Error::Shape(_) => InputError::new("--plane", e.to_string()),
            e => InputError::core("--side", e),
        })?;
        let v = if res.relative_error <= args.max_rel_error {
            Verdict::pass("holonomy")
        } else {
            Verdict::fail("holonomy", None, Some(format!("relative error {:e} above {:e}", res.relative_error, args.max_rel_error)))
        };
        let data = json!({
            "connection": label,
            "point": args.point,
            "plane": [args.plane.0, args.plane.1],
            "side": args.side,
            "result": res,
        });
        Ok(CheckReport::from_verdict(format!("holonomy[{}]", label), v).with_data(data))
    })?;
    Ok(vec![r])
}

/// Connection-independent identities, the duality facts, and the invariant calculus
/// on every Cartan instance.
pub fn identities(geo: &Geometry, opts: &RunOptions) -> Result<Vec<CheckReport>, InputError> {
    require_instances(geo, "identities")?
        .into_iter()
        .enumerate()
        .map(|(k, inst)| timed(opts, || identity_battery(&inst, k as u64, opts)))
        .collect()
}

fn identity_battery(inst: &Instance, stream: u64, opts: &RunOptions) -> Result<CheckReport, InputError> {
    let (g, conn, p) = (&inst.g, &inst.conn, inst.source.as_str());
    let chart = g.chart_arc().clone();
    let (n, r) = (g.dim(), g.rank());
    let mut rng = rng(opts.seed, 1000 + stream);
    let mut checks = Vec::new();

    checks.push(decide("oracle_agreement", p, oracle_agreement(g, conn))?);
    checks.push(decide("anchor_equivariance", p, check_anchor_equivariance(g, conn))?);
    let x = random_section(&mut rng, &chart, r, 1);
    let y = random_section(&mut rng, &chart, r, 1);
    let base = core(p, splitting_curvature_full(g, conn, &x, &y))?.base;
    checks.push(base.all_zero("splitting_base_zero", &chart));

    let nbar = core(p, induced_rep_on_g(g, conn))?;
    checks.push(renamed(core(p, duality_battery(g, &nbar))?, "duality_induced"));
    let other = random_g_connection(&mut rng, g, Bundle::Algebroid, r, 1);
    checks.push(renamed(core(p, duality_battery(g, &other))?, "duality_random"));
    let star = core(p, random_flat_rep(&mut rng, g))?;
    checks.push(core(p, scorch_check(g, &star))?);

    let cartan = decide("cartan", p, check_cartan(g, conn))?;
    let mut note = None;
    if cartan.passed() {
        let scalar = scalar_rep(g);
        let mut dd = Vec::new();
        let mut ident = Vec::new();
        for _ in 0..opts.forms {
            let th = random_one_form(&mut rng, g, 1, 2);
            let d1 = core(p, exterior_derivative(g, &scalar, &th))?;
            dd.push(core(p, exterior_derivative(g, &scalar, &d1))?.all_zero("dd_scalar", &chart));
            ident.push(core(p, d_theta_defect(g, &nbar, &scalar, &th))?.all_zero("d_theta_scalar", &chart));
            let tg = random_one_form(&mut rng, g, r, 2);
            let d1 = core(p, exterior_derivative(g, &nbar, &tg))?;
            dd.push(core(p, exterior_derivative(g, &nbar, &d1))?.all_zero("dd_adjoint", &chart));
            ident.push(core(p, d_theta_defect(g, &nbar, &nbar, &tg))?.all_zero("d_theta_adjoint", &chart));
        }
        checks.push(Verdict::all("d_squared", dd));
        checks.push(Verdict::all("d_theta", ident));
        checks.push(core(p, tautological_checks(g, &nbar))?);
    } else {
        let why = if cartan.failed() { "not Cartan" } else { "not decided Cartan" };
        note = Some(format!("invariant calculus skipped: connection is {}", why));
    }
    let mut v = Verdict::all("identities", checks);
    // informational: a connection that is not Cartan does not fail the identities
    v.checks.push(cartan);
    v.note = note;
    let data = json!({ "dim": n, "rank": r, "forms": if v.find("d_squared").is_some() { opts.forms } else { 0 } });
    Ok(CheckReport::from_verdict(format!("identities[{}]", inst.label), v).with_data(data))
}
