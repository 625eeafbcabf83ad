use crate::algebroid::Algebroid;
use crate::bundles::{Slot, TensorField};
use crate::connections::{curvature_g, dual_connection, g_tensor_cov_deriv, torsion_g, GConnection, Reps};
use crate::error::Result;
use crate::symcore::{canon, Expr};
use crate::verdict::{Status, Verdict};

/// `curv nabla(X,Y)Z - (nabla*_Z T*)(X,Y) - curv nabla*(X,Z)Y - curv nabla*(Z,Y)X`
/// on frames, as `[a][b][d][c]` for `X = e_a, Y = e_b, Z = e_d`.
pub fn dual2_defect(g: &Algebroid, conn: &GConnection) -> Result<TensorField> {
    let star = dual_connection(g, conn)?;
    let r_conn = curvature_g(g, conn)?;
    let r_star = curvature_g(g, &star)?;
    let t_star = torsion_g(g, &star)?;
    let dt = g_tensor_cov_deriv(g, Reps { on_g: Some(&star), on_tm: None }, &t_star)?;
    let r = g.rank();
    Ok(TensorField::from_fn(vec![Slot::LOW_G, Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![r, r, r, r], |idx| {
        let (a, b, d, c) = (idx[0], idx[1], idx[2], idx[3]);
        canon(&Expr::sum([
            r_conn.get(&[a, b, d, c]).clone(),
            -dt.get(&[a, b, c, d]).clone(),
            -r_star.get(&[a, d, b, c]).clone(),
            -r_star.get(&[d, b, a, c]).clone(),
        ]))
    }))
}

fn exact(name: &str, a: &[Expr], b: &[Expr]) -> Verdict {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        None => Verdict::pass(name),
        Some(k) => Verdict::fail(name, None, Some(format!("first differing component {}", k))),
    }
}

/// Duality facts for a g-connection on g: `nabla** = nabla` and `T nabla = -T nabla*`
/// (both compared on canonical forms, no sampling), and the curvature identity relating
/// `nabla` to `nabla*`.
pub fn duality_battery(g: &Algebroid, conn: &GConnection) -> Result<Verdict> {
    let star = dual_connection(g, conn)?;
    let back = dual_connection(g, &star)?;
    let flat = |c: &GConnection| c.coeffs().iter().flatten().flatten().cloned().collect::<Vec<_>>();
    let involution = exact("double_dual", &flat(&back), &flat(conn));
    let t = torsion_g(g, conn)?;
    let t_star = torsion_g(g, &star)?;
    let neg: Vec<Expr> = t_star.comps().iter().map(|e| canon(&-e)).collect();
    let torsion = exact("torsion_antisymmetric_under_dual", t.comps(), &neg);
    let dual2 = dual2_defect(g, conn)?.all_zero("dual2", g.chart());
    Ok(Verdict::all("duality", vec![involution, torsion, dual2]))
}

/// For a flat `nabla*`: `nabla = (nabla*)*` is flat iff `T nabla*` is `nabla*`-parallel.
/// Both sides are decided independently; the verdict passes when they agree.
pub fn scorch_check(g: &Algebroid, star: &GConnection) -> Result<Verdict> {
    let star_flat = curvature_g(g, star)?.all_zero("dual_flat", g.chart());
    let conn = dual_connection(g, star)?;
    let flat = curvature_g(g, &conn)?.all_zero("flat", g.chart());
    let t_star = torsion_g(g, star)?;
    let parallel =
        g_tensor_cov_deriv(g, Reps { on_g: Some(star), on_tm: None }, &t_star)?.all_zero("torsion_parallel", g.chart());
    let agree = match (flat.status, parallel.status) {
        (Status::Undecidable, _) | (_, Status::Undecidable) => Verdict { status: Status::Undecidable, ..Verdict::pass("equivalence") },
        (a, b) if a == b => Verdict::pass("equivalence"),
        (a, b) => Verdict::fail("equivalence", None, Some(format!("flat {:?} but torsion parallel {:?}", a, b))),
    };
    let mut v = Verdict::all("scorch", vec![star_flat, agree]);
    v.checks.extend([flat, parallel]);
    Ok(v)
}
