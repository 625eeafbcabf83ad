use std::sync::Arc;

use crate::algebroid::{build_poisson_algebroid, Algebroid};
use crate::bundles::{Slot, TensorField};
use crate::connections::{curvature_tm, tensor_cov_deriv, Bundle, TMConnection};
use crate::error::{Error, Result};
use crate::symcore::{canon, Chart, Expr};
use crate::verdict::{Status, Verdict, ZeroCheck};

use super::check_cartan;

/// The connection on `T*M` dual to an affine connection: `nabla_{d_i} dx^a = -Gamma^a_{ib} dx^b`.
pub fn cotangent_connection(conn: &TMConnection) -> Result<TMConnection> {
    let n = conn.dim();
    let gamma = (0..n)
        .map(|i| (0..n).map(|a| (0..n).map(|b| canon(&-conn.g(i, b, a))).collect()).collect())
        .collect();
    TMConnection::new(Bundle::Algebroid, gamma)
}

#[derive(Clone, Debug)]
pub struct PoissonReport {
    pub algebroid: Algebroid,
    pub connection: TMConnection,
    pub verdict: Verdict,
}

/// `Pi_p(a, b) = <dx^a, # dx^b>`, the bivector in the pairing convention of the bracket formulas.
fn paired(pi: &TensorField) -> TensorField {
    TensorField::from_fn(pi.slots().to_vec(), pi.dims().to_vec(), |idx| pi.get(&[idx[1], idx[0]]).clone())
}

/// `R(V,#a)b - R(V,#b)a - (nabla_V nabla Pi_p)(a,b)` on coordinate data, as `[v][a][b][c]`
/// (component `c` of a one-form). Zero iff the torsion-free connection is Cartan.
pub fn lemma_sx_tensor(chart: Arc<Chart>, pi: &TensorField, conn: &TMConnection) -> Result<TensorField> {
    let g = build_poisson_algebroid(chart.clone(), pi)?;
    let tm_conn = conn.clone().with_target(Bundle::Tangent);
    let cot = cotangent_connection(conn)?;
    let dpi = tensor_cov_deriv(&chart, &tm_conn, &paired(pi))?;
    let ddpi = tensor_cov_deriv(&chart, &tm_conn, &dpi)?;
    Ok(sx_from_parts(&g, &curvature_tm(&cot), &ddpi))
}

fn sx_from_parts(g: &Algebroid, r: &TensorField, ddpi: &TensorField) -> TensorField {
    let n = g.dim();
    TensorField::from_fn(vec![Slot::LOW_TM, Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![n, n, n, n], |idx| {
        let (w, a, b, c) = (idx[0], idx[1], idx[2], idx[3]);
        let mut terms = Vec::new();
        for j in 0..n {
            terms.push(g.rho(j, a) * r.get(&[w, j, b, c]));
            terms.push(-(g.rho(j, b) * r.get(&[w, j, a, c])));
        }
        terms.push(-ddpi.get(&[a, b, c, w]).clone());
        canon(&Expr::sum(terms))
    })
}

/// Sub-verdicts for a torsion-free connection on the cotangent algebroid of a Poisson manifold:
/// torsion freeness, the Cartan criterion for torsion-free connections, flatness, `nabla Pi`
/// parallel, and the bracket rewriting in terms of `nabla`.
pub fn poisson_report(chart: Arc<Chart>, pi: &TensorField, conn: &TMConnection) -> Result<PoissonReport> {
    let n = chart.dim();
    if conn.dim() != n || conn.rank() != n {
        return Err(Error::Shape(format!("affine connection must be {} x {} x {}", n, n, n)));
    }
    if pi.slots() != [Slot::UP_TM, Slot::UP_TM] || pi.dims() != [n, n] {
        return Err(Error::Shape("Poisson tensor must be a contravariant n x n tensor".into()));
    }
    let g = build_poisson_algebroid(chart.clone(), pi)?;
    let tm_conn = conn.clone().with_target(Bundle::Tangent);
    let cot = cotangent_connection(conn)?;

    let mut sym = ZeroCheck::new("christoffel_symmetric", &chart);
    let mut one_form = ZeroCheck::new("one_form_identity", &chart);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                sym.check(&[i, j, k], &(conn.g(i, j, k) - conn.g(j, i, k)));
                // d(dx^k) = 0 = <nabla_i dx^k, d_j> - <nabla_j dx^k, d_i>
                one_form.check(&[k, i, j], &(cot.g(i, k, j) - cot.g(j, k, i)));
            }
        }
    }
    let torsion_free = Verdict::all("torsion_free", vec![sym.finish(), one_form.finish()]);

    let pp = paired(pi);
    // dpi[a][b][v] = (nabla_v Pi_p)^{ab}, ddpi[a][b][v][w] = (nabla_w nabla Pi_p)(dx^a, dx^b)(d_v)
    let dpi = tensor_cov_deriv(&chart, &tm_conn, &pp)?;
    let ddpi = tensor_cov_deriv(&chart, &tm_conn, &dpi)?;
    let r = curvature_tm(&cot);

    let sx = sx_from_parts(&g, &r, &ddpi).all_zero("lemma_sx", &chart);
    let flat = curvature_tm(&tm_conn).all_zero("flat", &chart);
    let parallel = ddpi.all_zero("nabla_pi_parallel", &chart);

    let mut p2 = ZeroCheck::new("p2_identity", &chart);
    'p2: for a in 0..n {
        for b in (a + 1)..n {
            for k in 0..n {
                let mut terms = vec![-g.c(a, b, k).clone()];
                for j in 0..n {
                    terms.push(g.rho(j, a) * cot.g(j, b, k));
                    terms.push(-(g.rho(j, b) * cot.g(j, a, k)));
                }
                terms.push(-dpi.get(&[a, b, k]).clone());
                if !p2.check(&[a, b, k], &Expr::sum(terms)) {
                    break 'p2;
                }
            }
        }
    }

    // the lemma applies to torsion-free connections: its verdict must match the direct test
    let cartan = check_cartan(&g, &cot)?;
    let consistency = match (torsion_free.status, sx.status, cartan.status) {
        (Status::Pass, a, b) if a != Status::Undecidable && b != Status::Undecidable && a != b => Verdict::fail(
            "lemma_consistency",
            None,
            Some(format!("lemma says {:?}, compatibility test says {:?}", a, b)),
        ),
        _ => Verdict::pass("lemma_consistency"),
    };

    let mut verdict = Verdict::all("poisson", vec![torsion_free, sx, flat, parallel, p2.finish(), consistency]);
    verdict.note = Some(if verdict.passed() { "locally_action_algebroid" } else { "not_established" }.into());
    Ok(PoissonReport { algebroid: g, connection: cot, verdict })
}
