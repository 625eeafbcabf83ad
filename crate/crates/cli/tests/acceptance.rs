//! Acceptance suite. One `[PASS]`/`[FAIL]` line per criterion; exits non-zero on any failure.
//!
//! Tolerances are pinned here and not read from the environment.

use std::path::PathBuf;
use std::process::{Command as Proc, ExitCode};
use std::time::Instant;

use cartan_cli::geometry::{build, Geometry};
use cartan_cli::pipelines::{instances, Instance};
use cartan_cli::{parse_document, run, Command, HolonomyArgs, Pipeline, Settings};
use cartan_core::algebroid::Algebroid;
use cartan_core::bundles::Section;
use cartan_core::cartan::*;
use cartan_core::connections::{check_anchor_equivariance, morphism_curvature, Bundle, TMConnection};
use cartan_core::jet::splitting_curvature_full;
use cartan_core::random::{random_flat_rep, random_g_connection, random_instances, random_poly, random_section, rng, RandomInstance};
use cartan_core::symcore::{canon, eval, Expr, Sampling};
use cartan_core::{Status, Verdict};

/// Zero-test tolerance (absolute and relative) and sample count.
const TOL: f64 = 1e-9;
const SAMPLES: usize = 32;
const SEED: u64 = 0;
const RANDOM_INSTANCES: usize = 20;
const FORMS_PER_INSTANCE: usize = 10;
const HOLONOMY_SIDE: f64 = 0.01;
const HOLONOMY_MAX_REL: f64 = 1e-2;
/// `rel(2h) / rel(h)` for a method whose error is first order in `h`.
const HOLONOMY_ORDER_RATIO: (f64, f64) = (1.8, 2.2);
const HOLONOMY_POINTS: [[f64; 2]; 3] = [[1.2, 0.7], [0.8, 1.5], [2.0, 2.0]];

const CORPUS: [&str; 9] = [
    "so3_action",
    "euclid",
    "sphere",
    "ellipsoid",
    "hyperbolic",
    "so3_dual_poisson",
    "symplectic_r2",
    "affine_group_parallelism",
    "foliation_r3",
];

fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{}.json", name))
}

fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

fn settings() -> Settings {
    Settings { seed: Some(SEED), samples: SAMPLES, tol: TOL, timings: false, forms: FORMS_PER_INSTANCE }
}

fn geometry(name: &str) -> Geometry {
    let spec = parse_document(&corpus_text(name)).unwrap();
    build(&spec, Sampling { seed: SEED, samples: SAMPLES, eps_abs: TOL, eps_rel: TOL }).unwrap()
}

fn corpus_instances() -> Vec<(String, Instance)> {
    CORPUS.iter().flat_map(|n| instances(&geometry(n)).unwrap().into_iter().map(move |i| (n.to_string(), i))).collect()
}

fn random() -> Vec<RandomInstance> {
    random_instances(SEED, RANDOM_INSTANCES).unwrap()
}

type Outcome = Result<String, String>;

fn expect(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn passed(v: &Verdict, what: &str) -> Result<(), String> {
    expect(v.passed(), format!("{}: {:?} {:?}", what, v.status, v.witness))
}

fn sub<'a>(v: &'a Verdict, name: &str, what: &str) -> Result<&'a Verdict, String> {
    v.find(name).ok_or_else(|| format!("{}: no sub-verdict `{}`", what, name))
}

fn c1_oracle() -> Outcome {
    let corpus = corpus_instances();
    for (file, inst) in &corpus {
        let v = oracle_agreement(&inst.g, &inst.conn).map_err(|e| format!("{} {}: {}", file, inst.label, e))?;
        passed(&v, &format!("{} {}", file, inst.label))?;
    }
    for inst in random() {
        let v = oracle_agreement(&inst.g, &inst.conn).map_err(|e| e.to_string())?;
        passed(&v, &inst.label)?;
    }
    Ok(format!("{} corpus instances + {} random, zero disagreements", corpus.len(), RANDOM_INSTANCES))
}

fn c2_duality() -> Outcome {
    for (k, inst) in random().into_iter().enumerate() {
        let g = &inst.g;
        let mut r = rng(SEED, 500 + k as u64);
        let conn = random_g_connection(&mut r, g, Bundle::Algebroid, g.rank(), 1);
        let v = duality_battery(g, &conn).map_err(|e| e.to_string())?;
        for name in ["double_dual", "torsion_antisymmetric_under_dual", "dual2"] {
            passed(sub(&v, name, &inst.label)?, &format!("{} {}", inst.label, name))?;
        }
        let star = random_flat_rep(&mut r, g).map_err(|e| e.to_string())?;
        passed(&scorch_check(g, &star).map_err(|e| e.to_string())?, &format!("{} scorch", inst.label))?;
    }
    Ok(format!("{} random instances: double dual and torsion exact, dual2 and scorch zero", RANDOM_INSTANCES))
}

fn c3_theorem_a() -> Outcome {
    let s = settings();
    let r = run(&Command::Check(Some(Pipeline::TheoremA)), &corpus_text("so3_action"), &s);
    let c = r.check("theorem_a[action/canonical]").ok_or("so3_action: missing check")?;
    expect(c.note.as_deref() == Some("locally_symmetric"), format!("so3_action classified {:?}", c.note))?;

    let r = run(&Command::Check(Some(Pipeline::Poisson)), &corpus_text("symplectic_r2"), &s);
    let c = r.check("poisson[flat]").ok_or("symplectic_r2: missing check")?;
    expect(c.status == Status::Pass, "symplectic_r2 poisson pipeline")?;
    expect(c.checks.iter().all(|v| v.passed()), "symplectic_r2: a sub-verdict failed")?;

    let r = run(&Command::Check(Some(Pipeline::Geometry)), &corpus_text("affine_group_parallelism"), &s);
    let c = r.check("geometry").ok_or("affine: missing check")?;
    let zero = c.find("curvature_zero").ok_or("affine: no curvature_zero")?;
    let tc = c.find("theorem_c").ok_or("affine: no theorem_c")?;
    expect(zero.passed() && tc.passed(), format!("affine: Omega {:?}, theorem_c {:?}", zero.status, tc.status))?;
    Ok("so3 action locally symmetric; symplectic plane all pass; affine group Omega = 0, theorem_c pass".into())
}

fn c4_theorem_b() -> Outcome {
    let s = settings();
    for name in ["sphere", "hyperbolic"] {
        let r = run(&Command::Check(Some(Pipeline::Riemann)), &corpus_text(name), &s);
        let b = r.checks[0].find("theorem_b").ok_or("missing theorem_b")?;
        passed(b, name)?;
    }
    let r = run(&Command::Check(Some(Pipeline::Riemann)), &corpus_text("ellipsoid"), &s);
    let par = r.checks[0].find("curvature_parallel").ok_or("missing curvature_parallel")?;
    expect(par.failed(), "ellipsoid: curvature reported parallel")?;
    let w = par.witness.as_ref().ok_or("ellipsoid: no witness")?;
    // independent re-evaluation of the witness component of nabla R
    let geo = geometry("ellipsoid");
    let lc = levi_civita(&geo.chart, &geo.metric.as_ref().unwrap().sigma).unwrap();
    let dr = cartan_core::connections::tensor_cov_deriv(&geo.chart, &lc, &cartan_core::connections::curvature_tm(&lc)).unwrap();
    let value = eval(dr.get(&w.component), &w.point).map_err(|e| e.to_string())?;
    expect((value - w.value).abs() <= 1e-9 * (1.0 + value.abs()) && value.abs() > 1e-6, format!("witness value {} vs {}", w.value, value))?;
    Ok(format!(
        "sphere and hyperbolic pass; ellipsoid fails, nabla R{:?} = {:.4} at ({:.4}, {:.4})",
        w.component, value, w.point[0], w.point[1]
    ))
}

fn c5_poisson() -> Outcome {
    let s = settings();
    let r = run(&Command::Check(Some(Pipeline::Poisson)), &corpus_text("so3_dual_poisson"), &s);
    let c = r.check("poisson[flat]").ok_or("so3*: missing check")?;
    for name in ["torsion_free", "lemma_sx", "flat", "nabla_pi_parallel"] {
        passed(c.find(name).ok_or(name)?, &format!("so3* {}", name))?;
    }
    let bent = r#"{
        "spec_version": 1,
        "chart": {"coords": ["x1", "x2"], "bounds": [["-1", "1"], ["-1", "1"]]},
        "poisson": [["0", "1 + x1^2"], ["-1 - x1^2", "0"]],
        "connections": {"flat": {"on": "poisson", "gamma": [[["0", "0"], ["0", "0"]], [["0", "0"], ["0", "0"]]]}}
    }"#;
    let r = run(&Command::Check(Some(Pipeline::Poisson)), bent, &s);
    let c = r.check("poisson[flat]").ok_or("bent: missing check")?;
    let sx = c.find("lemma_sx").ok_or("bent: no lemma_sx")?;
    expect(sx.failed() && sx.witness.is_some(), format!("Pi12 = 1 + x1^2: lemma_sx {:?}", sx.status))?;
    Ok("so3* passes torsion_free, sx, flat, nabla Pi parallel; Pi12 = 1 + x1^2 fails sx with witness".into())
}

fn c6_holonomy() -> Outcome {
    let s = settings();
    let text = corpus_text("sphere");
    let rel = |p: [f64; 2], h: f64| -> Result<f64, String> {
        let args = HolonomyArgs { point: p.to_vec(), plane: (0, 1), side: h, connection: None, steps: 64, max_rel_error: HOLONOMY_MAX_REL };
        let r = run(&Command::Holonomy(args), &text, &s);
        let c = r.checks.first().ok_or_else(|| format!("{:?}", r.error))?;
        Ok(c.data.as_ref().unwrap()["result"]["relative_error"].as_f64().unwrap())
    };
    let mut worst: f64 = 0.0;
    for p in HOLONOMY_POINTS {
        let e = rel(p, HOLONOMY_SIDE)?;
        expect(e <= HOLONOMY_MAX_REL, format!("{:?}: relative error {:e}", p, e))?;
        let ratio = rel(p, 2.0 * HOLONOMY_SIDE)? / e;
        expect(
            ratio >= HOLONOMY_ORDER_RATIO.0 && ratio <= HOLONOMY_ORDER_RATIO.1,
            format!("{:?}: error ratio {} for doubled side", p, ratio),
        )?;
        worst = worst.max(e);
    }
    Ok(format!("h = {}: worst relative error {:.2e} <= {:e} at 3 points; error linear in h", HOLONOMY_SIDE, worst, HOLONOMY_MAX_REL))
}

fn c7_invariant() -> Outcome {
    let s = settings();
    let mut cartan_instances = 0;
    for name in CORPUS {
        let r = run(&Command::Identities, &corpus_text(name), &s);
        expect(r.error.is_none(), format!("{}: {:?}", name, r.error))?;
        for c in &r.checks {
            let cartan = c.find("cartan").ok_or("missing cartan")?;
            if !cartan.passed() {
                continue;
            }
            cartan_instances += 1;
            let forms = c.data.as_ref().unwrap()["forms"].as_u64().unwrap();
            expect(forms == FORMS_PER_INSTANCE as u64, format!("{} {}: {} forms", name, c.name, forms))?;
            for sub in ["d_squared", "d_theta", "tautological"] {
                let v = c.find(sub).ok_or_else(|| format!("{} {}: no {}", name, c.name, sub))?;
                passed(v, &format!("{} {} {}", name, c.name, sub))?;
            }
        }
    }
    let r = run(&Command::Identities, &corpus_text("affine_group_parallelism"), &s);
    let c = r.check("identities[tangent/left_invariant]").ok_or("affine: missing check")?;
    passed(c.find("d_omega_fundamental").ok_or("no D omega")?, "affine D omega = 0")?;
    passed(c.find("d_omega_torsion").ok_or("no d omega")?, "affine d omega = T")?;
    Ok(format!("{} Cartan corpus instances x {} one-forms; affine D omega = 0, d omega = T", cartan_instances, FORMS_PER_INSTANCE))
}

/// `phi(e_a) = e_a + f_a k` for a section `k` of the kernel of the anchor.
fn kernel_perturbation(g: &Algebroid, k: &Section, seed: u64) -> Vec<Vec<Expr>> {
    let r = g.rank();
    let mut rr = rng(SEED, 900 + seed);
    let f: Vec<Expr> = (0..r).map(|_| random_poly(&mut rr, g.chart(), 1, 2, 2)).collect();
    (0..r).map(|al| (0..r).map(|a| canon(&(Expr::int((al == a) as i64) + &f[a] * &k[al]))).collect()).collect()
}

fn c8_self_tests() -> Outcome {
    let mut pairs: Vec<(String, Algebroid, TMConnection)> =
        corpus_instances().into_iter().map(|(f, i)| (format!("{} {}", f, i.label), i.g, i.conn)).collect();
    pairs.extend(random().into_iter().map(|i| (i.label, i.g, i.conn)));
    for (k, (label, g, conn)) in pairs.iter().enumerate() {
        passed(&check_anchor_equivariance(g, conn).map_err(|e| e.to_string())?, &format!("{} z5", label))?;
        let mut r = rng(SEED, 700 + k as u64);
        let x = random_section(&mut r, g.chart(), g.rank(), 1);
        let y = random_section(&mut r, g.chart(), g.rank(), 1);
        let base = splitting_curvature_full(g, conn, &x, &y).map_err(|e| e.to_string())?.base;
        passed(&base.all_zero("base", g.chart()), &format!("{} zero base", label))?;
    }

    let mut morphisms = 0;
    for name in ["so3_action", "so3_dual_poisson"] {
        let geo = geometry(name);
        let g = geo.algebroids_in_order()[0].1.clone();
        let k = Section(geo.chart.coords());
        passed(&g.anchor_apply(&k).unwrap().all_zero("kernel", g.chart()), &format!("{} kernel section", name))?;
        for s in 0..5 {
            let phi = kernel_perturbation(&g, &k, s);
            let curv = morphism_curvature(&phi, &g, &g).map_err(|e| e.to_string())?;
            let mut nonzero = false;
            for a in 0..g.rank() {
                for b in 0..g.rank() {
                    let v = Section((0..g.rank()).map(|al| curv.get(&[a, b, al]).clone()).collect());
                    nonzero |= !v.all_zero("c", g.chart()).passed();
                    passed(&g.anchor_apply(&v).unwrap().all_zero("ker", g.chart()), &format!("{} phi{} ({},{})", name, s, a, b))?;
                }
            }
            expect(nonzero, format!("{} phi{}: curvature vanished, test is vacuous", name, s))?;
            morphisms += 1;
        }
    }
    Ok(format!("z5 and zero base on {} instances; {} non-morphisms with curvature in ker #", pairs.len(), morphisms))
}

fn c9_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_cartan");
    let mut runs = 0;
    for name in CORPUS {
        for cmd in ["validate", "check", "identities"] {
            let once = || {
                Proc::new(exe).arg(cmd).arg(corpus_path(name)).args(["--seed", "0"]).output().map_err(|e| e.to_string())
            };
            let (a, b) = (once()?, once()?);
            expect(a.status.code() == b.status.code(), format!("{} {}: exit codes differ", cmd, name))?;
            expect(!a.stdout.is_empty() && a.stdout == b.stdout, format!("{} {}: reports differ", cmd, name))?;
            runs += 1;
        }
    }
    Ok(format!("{} command/file pairs byte-identical across two runs", runs))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 oracle equivalence", c1_oracle),
        ("2 duality battery", c2_duality),
        ("3 theorem A positive controls", c3_theorem_a),
        ("4 theorem B discrimination", c4_theorem_b),
        ("5 Poisson sx discrimination", c5_poisson),
        ("6 holonomy vs curvature", c6_holonomy),
        ("7 invariant calculus", c7_invariant),
        ("8 unconditional self-tests", c8_self_tests),
        ("9 determinism", c9_determinism),
    ];
    println!("acceptance: seed {}, {} samples, tol {:e}", SEED, SAMPLES, TOL);
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {} ({:.1}s): {}", name, secs, detail),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} ({:.1}s): {}", name, secs, detail);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
