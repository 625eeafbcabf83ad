use serde::{Deserialize, Serialize};

use crate::algebroid::{Algebroid, Origin};
use crate::bundles::{Section, Slot, TensorField};
use crate::connections::{
    cov_deriv_g, cov_deriv_tm, curvature_tm, g_tensor_cov_deriv, induced_rep_on_g, induced_rep_on_tm, torsion_g,
    GConnection, Reps, TMConnection,
};
use crate::error::{Error, Result};
use crate::jet::splitting_curvature;
use crate::symcore::{canon, Expr};
use crate::verdict::{Status, Verdict, ZeroCheck};

/// `C(V,X,Y) = nabla_V[X,Y] - [nabla_V X, Y] - [X, nabla_V Y] - nabla_{nbar_Y V} X + nabla_{nbar_X V} Y`.
pub fn compat_defect(g: &Algebroid, conn: &TMConnection, v: &Section, x: &Section, y: &Section) -> Result<Section> {
    let rep_tm = induced_rep_on_tm(g, conn)?;
    compat_defect_with(g, conn, &rep_tm, v, x, y)
}

fn compat_defect_with(
    g: &Algebroid,
    conn: &TMConnection,
    rep_tm: &GConnection,
    v: &Section,
    x: &Section,
    y: &Section,
) -> Result<Section> {
    let chart = g.chart();
    let nv = |s: &Section| cov_deriv_tm(chart, conn, v, s);
    let t1 = nv(&g.bracket(x, y)?)?;
    let t2 = g.bracket(&nv(x)?, y)?;
    let t3 = g.bracket(x, &nv(y)?)?;
    let t4 = cov_deriv_tm(chart, conn, &cov_deriv_g(g, rep_tm, y, v)?, x)?;
    let t5 = cov_deriv_tm(chart, conn, &cov_deriv_g(g, rep_tm, x, v)?, y)?;
    Ok(&(&(&(&t1 - &t2) - &t3) - &t4) + &t5)
}

/// The compat defect on every frame triple, as a tensor `[i][a][b][c]` (antisymmetric in a, b).
pub fn compat_tensor(g: &Algebroid, conn: &TMConnection) -> Result<TensorField> {
    let rep_tm = induced_rep_on_tm(g, conn)?;
    let (n, r) = (g.dim(), g.rank());
    let mut out = TensorField::from_fn(vec![Slot::LOW_TM, Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![n, r, r, r], |_| Expr::zero());
    for i in 0..n {
        let v = Section::basis(n, i);
        for a in 0..r {
            for b in (a + 1)..r {
                let d = compat_defect_with(g, conn, &rep_tm, &v, &Section::basis(r, a), &Section::basis(r, b))?;
                for c in 0..r {
                    out.set(&[i, a, b, c], d[c].clone());
                    out.set(&[i, b, a, c], canon(&-&d[c]));
                }
            }
        }
    }
    Ok(out)
}

/// The jet-side oracle: `curv s(e_a, e_b)(d_i)` as a tensor `[i][a][b][c]`.
pub fn splitting_tensor(g: &Algebroid, conn: &TMConnection) -> Result<TensorField> {
    let (n, r) = (g.dim(), g.rank());
    let mut out = TensorField::from_fn(vec![Slot::LOW_TM, Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![n, r, r, r], |_| Expr::zero());
    for a in 0..r {
        for b in (a + 1)..r {
            let phi = splitting_curvature(g, conn, &Section::basis(r, a), &Section::basis(r, b))?;
            for (i, row) in phi.iter().enumerate() {
                for c in 0..r {
                    out.set(&[i, a, b, c], row[c].clone());
                    out.set(&[i, b, a, c], canon(&-&row[c]));
                }
            }
        }
    }
    Ok(out)
}

/// Componentwise agreement of the compat defect and the splitting curvature.
pub fn oracle_agreement(g: &Algebroid, conn: &TMConnection) -> Result<Verdict> {
    let a = compat_tensor(g, conn)?;
    let b = splitting_tensor(g, conn)?;
    Ok(a.sub(&b)?.all_zero("oracle_agreement", g.chart()))
}

/// Cartan test: compat defect and splitting curvature must both vanish, and must agree.
pub fn check_cartan(g: &Algebroid, conn: &TMConnection) -> Result<Verdict> {
    conn.check_on(g)?;
    let compat = compat_tensor(g, conn)?.all_zero("compat", g.chart());
    let split = splitting_tensor(g, conn)?.all_zero("splitting_curvature", g.chart());
    let decided = |v: &Verdict| v.status != Status::Undecidable;
    if decided(&compat) && decided(&split) && compat.status != split.status {
        return Err(Error::Internal(format!(
            "compat defect says {:?} but splitting curvature says {:?}",
            compat.status, split.status
        )));
    }
    Ok(Verdict::all("cartan", vec![compat, split]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    LocallySymmetric,
    Curved,
    NotCartan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremA {
    pub classification: Option<Classification>,
    pub verdict: Verdict,
}

/// Locally symmetric iff Cartan and flat.
pub fn theorem_a_verdict(g: &Algebroid, conn: &TMConnection) -> Result<TheoremA> {
    let cartan = check_cartan(g, conn)?;
    if cartan.failed() {
        let verdict = Verdict { name: "theorem_a".into(), checks: vec![cartan.clone()], ..cartan };
        return Ok(TheoremA { classification: Some(Classification::NotCartan), verdict: verdict.with_note("not_cartan") });
    }
    let flat = curvature_tm(conn).all_zero("flat", g.chart());
    let mut checks = vec![cartan, flat.clone()];
    let classification = match flat.status {
        Status::Pass => Some(Classification::LocallySymmetric),
        Status::Fail => Some(Classification::Curved),
        Status::Undecidable => None,
    };
    if classification == Some(Classification::LocallySymmetric) && matches!(g.origin(), Origin::Action(_)) {
        let mut z = ZeroCheck::new("constant_sections_parallel", g.chart());
        for (i, m) in conn.gamma().iter().enumerate() {
            for (a, row) in m.iter().enumerate() {
                for (b, e) in row.iter().enumerate() {
                    z.check(&[i, a, b], e);
                }
            }
        }
        checks.push(z.finish());
    }
    let mut verdict = Verdict::all("theorem_a", checks);
    if let Some(c) = classification {
        verdict.note = Some(serde_json_name(c).into());
    }
    Ok(TheoremA { classification, verdict })
}

pub(crate) fn serde_json_name(c: Classification) -> &'static str {
    match c {
        Classification::LocallySymmetric => "locally_symmetric",
        Classification::Curved => "curved",
        Classification::NotCartan => "not_cartan",
    }
}

/// `(nbar_{e_d} T)(e_a, e_b)` as a tensor `[a][b][c][d]`, for a representation on g.
pub fn torsion_derivative(g: &Algebroid, rep: &GConnection) -> Result<TensorField> {
    let t = torsion_g(g, rep)?;
    g_tensor_cov_deriv(g, Reps { on_g: Some(rep), on_tm: None }, &t)
}

/// Transitive case: locally symmetric iff the torsion of nbar is nbar-parallel.
pub fn transitive_symmetry_check(g: &Algebroid, conn: &TMConnection) -> Result<Verdict> {
    let orbits = g.orbit_report()?;
    if !orbits.transitive {
        let k = orbits.ranks.iter().position(|&k| k != g.dim()).unwrap_or(0);
        return Err(Error::Intransitive { point: g.chart().sample_points()[k].clone(), rank: orbits.ranks[k] });
    }
    let rep = induced_rep_on_g(g, conn)?;
    let dt = torsion_derivative(g, &rep)?;
    Ok(dt.all_zero("torsion_parallel", g.chart()))
}

/// `curv nabla(#X,#Y)Z - (nbar_Z T)(X,Y)` on frame triples.
pub fn abba_defect(g: &Algebroid, conn: &TMConnection) -> Result<TensorField> {
    let rep = induced_rep_on_g(g, conn)?;
    let dt = torsion_derivative(g, &rep)?;
    let curv = curvature_tm(conn);
    let (n, r) = (g.dim(), g.rank());
    Ok(TensorField::from_fn(vec![Slot::LOW_G, Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![r, r, r, r], |idx| {
        let (a, b, d, c) = (idx[0], idx[1], idx[2], idx[3]);
        let mut terms = Vec::new();
        for i in 0..n {
            if g.rho(i, a).is_literal_zero() {
                continue;
            }
            for j in 0..n {
                if g.rho(j, b).is_literal_zero() {
                    continue;
                }
                terms.push(g.rho(i, a) * g.rho(j, b) * curv.get(&[i, j, d, c]));
            }
        }
        terms.push(-dt.get(&[a, b, c, d]).clone());
        canon(&Expr::sum(terms))
    }))
}
