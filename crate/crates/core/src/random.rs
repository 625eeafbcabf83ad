//! Seeded random instances for property batteries: small algebroids in random
//! polynomial frames with random polynomial connections.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{build_action_algebroid, build_foliation_algebroid, build_poisson_algebroid, Algebroid, LieAlgebra};
use crate::bundles::{Section, Slot, TensorField};
use crate::connections::{Bundle, GConnection, TMConnection};
use crate::error::Result;
use crate::jet::JetSection;
use crate::symcore::{canon, integer, Chart, Expr};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ stream)
}

pub fn unit_box(names: &[&str]) -> Arc<Chart> {
    Arc::new(Chart::new(names, names.iter().map(|_| (integer(-1), integer(1))).collect()).expect("chart"))
}

/// Random polynomial with at most `terms` monomials of total degree <= `degree`,
/// integer coefficients in `[-k, k]`.
pub fn random_poly(rng: &mut impl Rng, chart: &Chart, degree: u32, terms: usize, k: i64) -> Expr {
    let n = chart.dim();
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=terms) {
        let c = rng.gen_range(-k..=k);
        if c == 0 {
            continue;
        }
        let deg = rng.gen_range(0..=degree);
        let mut factors = vec![Expr::int(c)];
        for _ in 0..deg {
            if n > 0 {
                factors.push(chart.coord(rng.gen_range(0..n)));
            }
        }
        out.push(Expr::product(factors));
    }
    canon(&Expr::sum(out))
}

/// Sparse random polynomial: zero with probability one half.
pub fn sparse_poly(rng: &mut impl Rng, chart: &Chart, degree: u32) -> Expr {
    if rng.gen_bool(0.5) {
        Expr::zero()
    } else {
        random_poly(rng, chart, degree, 2, 2)
    }
}

pub fn random_section(rng: &mut impl Rng, chart: &Chart, rank: usize, degree: u32) -> Section {
    Section((0..rank).map(|_| random_poly(rng, chart, degree, 2, 2)).collect())
}

pub fn random_jet(rng: &mut impl Rng, chart: &Chart, rank: usize, degree: u32) -> JetSection {
    JetSection {
        base: random_section(rng, chart, rank, degree),
        phi: (0..chart.dim()).map(|_| Section((0..rank).map(|_| sparse_poly(rng, chart, degree)).collect())).collect(),
    }
}

pub fn random_tm_connection(rng: &mut impl Rng, chart: &Chart, rank: usize, degree: u32) -> TMConnection {
    let n = chart.dim();
    let gamma = (0..n).map(|_| (0..rank).map(|_| (0..rank).map(|_| sparse_poly(rng, chart, degree)).collect()).collect()).collect();
    TMConnection::new(Bundle::Algebroid, gamma).expect("shape")
}

pub fn random_g_connection(rng: &mut impl Rng, g: &Algebroid, target: Bundle, m: usize, degree: u32) -> GConnection {
    let r = g.rank();
    let coeffs =
        (0..r).map(|_| (0..m).map(|_| (0..m).map(|_| sparse_poly(rng, g.chart(), degree)).collect()).collect()).collect();
    GConnection::new(target, coeffs).expect("shape")
}

/// Random alternating g-valued 1-form `theta[a][c]`.
pub fn random_one_form(rng: &mut impl Rng, g: &Algebroid, m: usize, degree: u32) -> TensorField {
    let r = g.rank();
    let comps = (0..r * m).map(|_| sparse_poly(rng, g.chart(), degree)).collect();
    TensorField::new(vec![Slot::LOW_G, Slot::UP_G], vec![r, m], comps).expect("shape")
}

/// Unipotent upper-triangular frame change with entries of degree <= 1.
pub fn random_unipotent(rng: &mut impl Rng, chart: &Chart, r: usize) -> Vec<Vec<Expr>> {
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => Expr::one(),
                    std::cmp::Ordering::Less => random_poly(rng, chart, 1, 2, 1),
                    std::cmp::Ordering::Greater => Expr::zero(),
                })
                .collect()
        })
        .collect()
}

fn fields(chart: &Chart, rows: &[&[&str]]) -> Vec<Section> {
    rows.iter().map(|r| Section::parse(chart, r).expect("field")).collect()
}

/// The base algebroids random instances are drawn from.
pub fn base_pool() -> Vec<(&'static str, Algebroid)> {
    let mut pool = Vec::new();
    let r2 = unit_box(&["x", "y"]);
    pool.push(("tangent_r2", Algebroid::tangent(r2.clone())));
    let r3 = unit_box(&["x1", "x2", "x3"]);
    let so3_fields = fields(&r3, &[&["0", "x3", "-x2"], &["-x3", "0", "x1"], &["x2", "-x1", "0"]]);
    pool.push(("so3_action", build_action_algebroid(r3.clone(), &LieAlgebra::so3(), &so3_fields).expect("so3")));
    let r1 = unit_box(&["x"]);
    pool.push(("aff1_line", build_action_algebroid(r1.clone(), &LieAlgebra::aff1(), &fields(&r1, &[&["-x"], &["1"]])).expect("aff1")));
    pool.push(("sl2_line", build_action_algebroid(r1.clone(), &LieAlgebra::sl2(), &fields(&r1, &[&["1"], &["x"], &["x^2"]])).expect("sl2")));
    let pi = lie_poisson_so3(&r3);
    pool.push(("so3_dual", build_poisson_algebroid(r3.clone(), &pi).expect("poisson")));
    let so3 = LieAlgebra::so3();
    let structure = so3.constants().iter().map(|m| m.iter().map(|v| v.iter().map(|c| Expr::constant(c.clone())).collect()).collect()).collect();
    pool.push(("so3_bundle_r2", Algebroid::new(r2.clone(), vec![vec![Expr::zero(); 3]; 2], structure).expect("bundle")));
    pool.push(("plane_foliation_r3", build_foliation_algebroid(r3.clone(), &fields(&r3, &[&["1", "0", "0"], &["0", "1", "0"]])).expect("foliation")));
    pool
}

/// `Pi^{ij} = eps^{ijk} x^k` on a chart with three coordinates.
pub fn lie_poisson_so3(chart: &Chart) -> TensorField {
    let x = chart.coords();
    let mut comps = vec![Expr::zero(); 9];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        comps[i * 3 + j] = x[k].clone();
        comps[j * 3 + i] = canon(&-&x[k]);
    }
    TensorField::new(vec![Slot::UP_TM, Slot::UP_TM], vec![3, 3], comps).expect("shape")
}

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub label: String,
    pub g: Algebroid,
    pub conn: TMConnection,
}

/// Instance `k` of the seeded family: a pool algebroid in a random unipotent frame
/// with a random connection of degree <= 2.
pub fn random_instance(seed: u64, k: usize) -> Result<RandomInstance> {
    let pool = base_pool();
    let (name, base) = &pool[k % pool.len()];
    let mut rng = rng(seed, k as u64);
    let p = random_unipotent(&mut rng, base.chart(), base.rank());
    let g = base.frame_change(&p)?;
    let conn = random_tm_connection(&mut rng, g.chart(), g.rank(), 2);
    Ok(RandomInstance { label: format!("{}#{}", name, k), g, conn })
}

pub fn random_instances(seed: u64, count: usize) -> Result<Vec<RandomInstance>> {
    (0..count).map(|k| random_instance(seed, k)).collect()
}

/// A flat g-connection on g obtained by gauge-transforming the trivial one:
/// the columns of a random unipotent `P` are declared parallel.
pub fn random_flat_rep(rng: &mut impl Rng, g: &Algebroid) -> Result<GConnection> {
    let r = g.rank();
    let p = random_unipotent(rng, g.chart(), r);
    let pinv = crate::symcore::matrix::inverse(&p)?;
    // M_a = -rho_a(P) P^{-1}, acting on column vectors; coeffs[a][d][c] = M_a[c][d]
    let coeffs = (0..r)
        .map(|a| {
            let dp: Vec<Vec<Expr>> = p.iter().map(|row| row.iter().map(|e| g.rho_apply(a, e)).collect()).collect();
            let m = crate::symcore::matrix::matmul(&dp, &pinv);
            (0..r).map(|d| (0..r).map(|c| canon(&-&m[c][d])).collect()).collect()
        })
        .collect();
    GConnection::new(Bundle::Algebroid, coeffs)
}
