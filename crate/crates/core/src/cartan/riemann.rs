//! Riemannian structures as Cartan algebroids: the subalgebroid of `J^1(TM)` of
//! first-order infinitesimal isometries, with its reductive Cartan connection.

use std::sync::Arc;

use crate::algebroid::{Algebroid, Origin};
use crate::bundles::{lie_derivative, Section, Slot, TensorField};
use crate::connections::{
    cov_deriv_tm, curvature_tm, induced_rep_on_g, induced_rep_on_tm, same_g_connection, same_tm_connection,
    tensor_cov_deriv, Bundle, GConnection, TMConnection,
};
use crate::error::{Error, Result};
use crate::jet::{adjoint_action, jet_bracket, JetSection};
use crate::symcore::matrix::{self, ExprMatrix};
use crate::symcore::{canon, differentiate, eval, Chart, Expr};
use crate::verdict::{Status, Verdict, Witness, ZeroCheck};

use super::{connection_from_rep, reductive_connection, theorem_a_verdict, Classification};

/// The metric as an `n x n` matrix, checked symmetric and nondegenerate at every sample point.
pub fn metric_matrix(chart: &Chart, sigma: &TensorField) -> Result<ExprMatrix> {
    let n = chart.dim();
    if sigma.dims() != [n, n] || sigma.slots() != [Slot::LOW_TM, Slot::LOW_TM] {
        return Err(Error::Shape(format!("metric must be a covariant {} x {} tensor", n, n)));
    }
    let m: ExprMatrix = (0..n).map(|i| (0..n).map(|j| sigma.get(&[i, j]).clone()).collect()).collect();
    let mut z = ZeroCheck::new("metric_symmetric", chart);
    for i in 0..n {
        for j in (i + 1)..n {
            z.check(&[i, j], &(&m[i][j] - &m[j][i]));
        }
    }
    z.finish().require(Error::DegenerateMetric)?;
    let det = matrix::det(&m);
    for p in chart.sample_points() {
        let value = eval(&det, p).unwrap_or(f64::NAN);
        if !(value.abs() > 1e-12) {
            return Err(Error::DegenerateMetric(Witness { point: p.clone(), component: Vec::new(), value }));
        }
    }
    Ok(m)
}

/// Christoffel symbols `gamma[i][j][k] = Gamma^k_ij` of the Levi-Civita connection.
pub fn levi_civita(chart: &Chart, sigma: &TensorField) -> Result<TMConnection> {
    let g = metric_matrix(chart, sigma)?;
    let ginv = matrix::inverse(&g)?;
    let n = chart.dim();
    let dg: Vec<Vec<Vec<Expr>>> =
        (0..n).map(|k| (0..n).map(|i| (0..n).map(|j| differentiate(&g[i][j], k)).collect()).collect()).collect();
    let gamma = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| {
                            let terms = (0..n).filter(|&l| !ginv[k][l].is_literal_zero()).map(|l| {
                                &ginv[k][l] * &(&(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j])
                            });
                            canon(&(Expr::ratio(1, 2) * Expr::sum(terms)))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    TMConnection::new(Bundle::Tangent, gamma)
}

/// `E_pq (p < q)`: `E_pq(V) = sigma(V, d_p) d_q - sigma(V, d_q) d_p`, as `A[s][l]` with `A(d_s) = A[s][l] d_l`.
pub fn default_h_frame(sigma: &ExprMatrix) -> Vec<ExprMatrix> {
    let n = sigma.len();
    let mut out = Vec::new();
    for p in 0..n {
        for q in (p + 1)..n {
            out.push(
                (0..n)
                    .map(|s| {
                        (0..n)
                            .map(|l| {
                                let mut e = Expr::zero();
                                if l == q {
                                    e = &e + &sigma[s][p];
                                }
                                if l == p {
                                    e = &e - &sigma[s][q];
                                }
                                canon(&e)
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
    }
    out
}

/// `sigma(A d_s, d_t) + sigma(d_s, A d_t) = 0` for each endomorphism field.
pub fn check_skew(chart: &Chart, sigma: &ExprMatrix, frame: &[ExprMatrix]) -> Result<()> {
    let n = sigma.len();
    for (index, a) in frame.iter().enumerate() {
        if a.len() != n || a.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("h_frame[{}] must be {} x {}", index, n, n)));
        }
        let mut z = ZeroCheck::new("skew", chart);
        for s in 0..n {
            for t in s..n {
                let e = Expr::sum((0..n).flat_map(|l| [&a[s][l] * &sigma[l][t], &a[t][l] * &sigma[s][l]]));
                z.check(&[s, t], &e);
            }
        }
        z.finish().require(|witness| Error::NotSkew { index, witness })?;
    }
    Ok(())
}

/// `(A.R)(X,Y)Z = A R(X,Y)Z - R(AX,Y)Z - R(X,AY)Z - R(X,Y)AZ`, components `[i][j][m][l]`.
pub fn derivation_action(a: &ExprMatrix, r: &TensorField) -> TensorField {
    let n = a.len();
    TensorField::from_fn(r.slots().to_vec(), r.dims().to_vec(), |idx| {
        let (i, j, m, l) = (idx[0], idx[1], idx[2], idx[3]);
        let mut terms = Vec::new();
        for s in 0..n {
            terms.push(r.get(&[i, j, m, s]) * &a[s][l]);
            terms.push(-(&a[i][s] * r.get(&[s, j, m, l])));
            terms.push(-(&a[j][s] * r.get(&[i, s, m, l])));
            terms.push(-(&a[m][s] * r.get(&[i, j, s, l])));
        }
        canon(&Expr::sum(terms))
    })
}

/// Lie derivative of the metric along each field; pass iff every field is Killing.
pub fn killing_check(chart: &Chart, sigma: &TensorField, fields: &[Section]) -> Result<Verdict> {
    let mut checks = Vec::new();
    for (k, v) in fields.iter().enumerate() {
        checks.push(lie_derivative(chart, v, sigma)?.all_zero(&format!("killing_{}", k), chart));
    }
    Ok(Verdict::all("killing", checks))
}

/// The rank `n + n(n-1)/2` algebroid of jets `(X, phi)` with `phi + nabla.X` skew.
#[derive(Clone, Debug)]
pub struct IsometryAlgebroid {
    pub algebroid: Algebroid,
    /// Frame as jets of the tangent algebroid: `s_LC(d_k)` then the h-frame.
    pub frame: Vec<JetSection>,
    pub h_frame: Vec<ExprMatrix>,
    /// `nbar_{f_a} d_j = ad_{f_a} d_j`, restricted from the jet algebroid.
    pub rep_tm: GConnection,
}

struct HSolver {
    frame: Vec<ExprMatrix>,
    // default frame: coordinates are `g^{pm} psi_m^q`
    ginv: Option<ExprMatrix>,
    gram_inv: Option<ExprMatrix>,
}

impl HSolver {
    fn coords(&self, psi: &[Section]) -> Vec<Expr> {
        let n = psi.len();
        if let Some(ginv) = &self.ginv {
            let mut out = Vec::new();
            for p in 0..n {
                for q in (p + 1)..n {
                    out.push(canon(&Expr::sum((0..n).map(|m| &ginv[p][m] * &psi[m][q]))));
                }
            }
            return out;
        }
        let gram_inv = self.gram_inv.as_ref().expect("gram");
        let rhs: Vec<Expr> = self
            .frame
            .iter()
            .map(|e| canon(&Expr::sum((0..n).flat_map(|s| (0..n).map(move |l| &e[s][l] * &psi[s][l])))))
            .collect();
        matrix::apply(gram_inv, &rhs)
    }
}

/// Build the isometry algebroid of a metric from its Levi-Civita connection.
pub fn isometry_algebroid(chart: Arc<Chart>, sigma: &TensorField, h_frame: Option<&[ExprMatrix]>) -> Result<IsometryAlgebroid> {
    let n = chart.dim();
    let g = metric_matrix(&chart, sigma)?;
    let ginv = matrix::inverse(&g)?;
    let lc = levi_civita(&chart, sigma)?;
    let (frame_h, solver) = match h_frame {
        None => {
            let f = default_h_frame(&g);
            (f.clone(), HSolver { frame: f, ginv: Some(ginv), gram_inv: None })
        }
        Some(f) => {
            let m = n * (n.saturating_sub(1)) / 2;
            if f.len() != m {
                return Err(Error::Shape(format!("h_frame must have {} elements", m)));
            }
            let gram: ExprMatrix = f
                .iter()
                .map(|a| {
                    f.iter()
                        .map(|b| canon(&Expr::sum((0..n).flat_map(|s| (0..n).map(move |l| &a[s][l] * &b[s][l])))))
                        .collect()
                })
                .collect();
            let gram_inv = matrix::inverse(&gram)?;
            (f.to_vec(), HSolver { frame: f.to_vec(), ginv: None, gram_inv: Some(gram_inv) })
        }
    };
    check_skew(&chart, &g, &frame_h)?;
    let m = frame_h.len();
    let rank = n + m;
    let tm = Algebroid::tangent(chart.clone());

    let mut frame = Vec::with_capacity(rank);
    for k in 0..n {
        let phi = (0..n).map(|i| Section((0..n).map(|b| canon(&-lc.g(i, k, b))).collect())).collect();
        frame.push(JetSection::new(Section::basis(n, k), phi));
    }
    for a in &frame_h {
        frame.push(JetSection::new(Section::zero(n), a.iter().map(|row| Section(row.clone())).collect()));
    }

    let mut structure = vec![vec![vec![Expr::zero(); rank]; rank]; rank];
    for a in 0..rank {
        for b in (a + 1)..rank {
            let j = jet_bracket(&tm, &frame[a], &frame[b])?;
            let psi: Vec<Section> = (0..n).map(|mm| &j.phi[mm] + &lc.along_coord(mm, &j.base)).collect();
            let h = solver.coords(&psi);
            // the remainder must vanish: the jets close under the bracket
            let mut z = ZeroCheck::new("h_closure", &chart);
            for (s, row) in psi.iter().enumerate() {
                for l in 0..n {
                    let e = &row[l] - &Expr::sum((0..m).map(|c| &h[c] * &frame_h[c][s][l]));
                    z.check(&[a, b, s, l], &e);
                }
            }
            z.finish().require(|w| Error::Shape(format!("h_frame does not span the skew endomorphisms: {}", w)))?;
            let coeffs: Vec<Expr> = j.base.0.iter().cloned().chain(h).collect();
            for c in 0..rank {
                structure[b][a][c] = canon(&-&coeffs[c]);
                structure[a][b][c] = coeffs[c].clone();
            }
        }
    }
    let anchor: ExprMatrix =
        (0..n).map(|i| (0..rank).map(|a| if a == i { Expr::one() } else { Expr::zero() }).collect()).collect();
    let algebroid = Algebroid::new(chart.clone(), anchor, structure)?.with_origin(Origin::Derived);

    let coeffs = frame
        .iter()
        .map(|f| (0..n).map(|jj| adjoint_action(&tm, f, &Section::basis(n, jj)).map(|s| s.0)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let rep_tm = GConnection::new(Bundle::Tangent, coeffs)?;
    Ok(IsometryAlgebroid { algebroid, frame, h_frame: frame_h, rep_tm })
}

impl IsometryAlgebroid {
    /// `t(d_k) = s_LC(d_k)`.
    pub fn splitting(&self) -> Vec<Section> {
        let n = self.algebroid.dim();
        (0..n).map(|k| Section::basis(self.algebroid.rank(), k)).collect()
    }

    /// The section of g corresponding to the 1-jet of a vector field, `j^1 V = V^k f_k + psi`
    /// with `psi = nabla.V`; requires `nabla V` skew, which holds for Killing fields.
    pub fn jet_of_field(&self, lc: &TMConnection, v: &Section) -> Result<Section> {
        let chart = self.algebroid.chart();
        let n = chart.dim();
        let g = self.h_frame.len();
        let psi: Vec<Section> = (0..n).map(|m| lc.along_coord(m, v)).collect();
        // solve against the h-frame by the Gram pairing, then confirm
        let gram: ExprMatrix = self
            .h_frame
            .iter()
            .map(|a| {
                self.h_frame
                    .iter()
                    .map(|b| canon(&Expr::sum((0..n).flat_map(|s| (0..n).map(move |l| &a[s][l] * &b[s][l])))))
                    .collect()
            })
            .collect();
        let solver = HSolver { frame: self.h_frame.clone(), ginv: None, gram_inv: Some(matrix::inverse(&gram)?) };
        let h = solver.coords(&psi);
        let mut z = ZeroCheck::new("jet_in_g", chart);
        for (s, row) in psi.iter().enumerate() {
            for l in 0..n {
                z.check(&[s, l], &(&row[l] - &Expr::sum((0..g).map(|c| &h[c] * &self.h_frame[c][s][l]))));
            }
        }
        z.finish().require(|w| Error::Shape(format!("nabla V is not skew, so j^1 V is not in g: {}", w)))?;
        Ok(Section(v.0.iter().cloned().chain(h).collect()))
    }
}

#[derive(Clone, Debug)]
pub struct RiemannReport {
    pub levi_civita: TMConnection,
    pub curvature: TensorField,
    pub isometry: IsometryAlgebroid,
    pub connection: TMConnection,
    pub classification: Option<Classification>,
    pub verdict: Verdict,
}

/// Options for [`riemann_pipeline`].
#[derive(Clone, Debug, Default)]
pub struct RiemannOptions<'a> {
    pub h_frame: Option<&'a [ExprMatrix]>,
    /// Vector fields expected to be Killing; each is checked and its jet checked parallel.
    pub killing: &'a [Section],
}

/// Theorem B verdict (curvature h-invariant and parallel, Levi-Civita being torsion free),
/// cross-checked against the flatness of the reductive Cartan connection on the isometry algebroid.
pub fn riemann_pipeline(chart: Arc<Chart>, sigma: &TensorField, opts: &RiemannOptions<'_>) -> Result<RiemannReport> {
    let n = chart.dim();
    let lc = levi_civita(&chart, sigma)?;
    let curvature = curvature_tm(&lc);
    let iso = isometry_algebroid(chart.clone(), sigma, opts.h_frame)?;

    let mut torsion = ZeroCheck::new("levi_civita_torsion_free", &chart);
    let mut metric = ZeroCheck::new("levi_civita_metric", &chart);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                torsion.check(&[i, j, k], &(lc.g(i, j, k) - lc.g(j, i, k)));
            }
        }
    }
    for (idx, e) in crate::bundles::multi_indices(&[n, n, n]).iter().zip(tensor_cov_deriv(&chart, &lc, sigma)?.comps()) {
        if !metric.check(idx, e) {
            break;
        }
    }

    let mut inv_checks = Vec::new();
    for (k, a) in iso.h_frame.iter().enumerate() {
        inv_checks.push(derivation_action(a, &curvature).all_zero(&format!("h_invariant_{}", k), &chart));
    }
    let h_invariant = Verdict::all("h_invariant", inv_checks);
    let parallel = tensor_cov_deriv(&chart, &lc, &curvature)?.all_zero("curvature_parallel", &chart);
    let theorem_b = Verdict::all("theorem_b", vec![h_invariant, parallel]);

    let g = &iso.algebroid;
    let t = iso.splitting();
    let conn = reductive_connection(g, &t, &iso.rep_tm)?;
    let rep_back = same_g_connection("induced_rep_matches", &chart, &induced_rep_on_tm(g, &conn)?, &iso.rep_tm)?;
    let theorem_a = theorem_a_verdict(g, &conn)?;

    // curv t(d_i, d_j) = [f_i, f_j] lies in h and equals -R(d_i, d_j) as an endomorphism
    let mut f3 = ZeroCheck::new("f3", &chart);
    'f3: for i in 0..n {
        for j in (i + 1)..n {
            for m in 0..n {
                for l in 0..n {
                    let e = Expr::sum(
                        iso.h_frame.iter().enumerate().map(|(c, a)| g.c(i, j, n + c) * &a[m][l]),
                    ) + curvature.get(&[i, j, m, l]).clone();
                    if !f3.check(&[i, j, m, l], &e) {
                        break 'f3;
                    }
                }
            }
        }
    }

    let independence = splitting_independence(g, &conn, &t, n)?;

    let agreement = {
        let flat = theorem_a.verdict.find("flat").map(|v| v.status);
        let b = theorem_b.status;
        match (theorem_a.classification, flat) {
            (Some(Classification::NotCartan), _) => Verdict::fail("theorems_agree", None, Some("not_cartan".into())),
            (_, Some(Status::Undecidable)) | (None, _) => Verdict { status: Status::Undecidable, ..Verdict::pass("theorems_agree") },
            _ if b == Status::Undecidable => Verdict { status: Status::Undecidable, ..Verdict::pass("theorems_agree") },
            (Some(c), _) => {
                if (c == Classification::LocallySymmetric) == (b == Status::Pass) {
                    Verdict::pass("theorems_agree")
                } else {
                    Verdict::fail("theorems_agree", None, Some(format!("theorem A says {:?}, theorem B says {:?}", c, b)))
                }
            }
        }
    };

    let mut checks = vec![
        theorem_b,
        torsion.finish(),
        metric.finish(),
        rep_back,
        theorem_a.verdict.clone(),
        agreement,
        f3.finish(),
        independence,
    ];
    if !opts.killing.is_empty() {
        checks.push(killing_check(&chart, sigma, opts.killing)?);
        let mut par = Vec::new();
        for (k, v) in opts.killing.iter().enumerate() {
            let s = iso.jet_of_field(&lc, v)?;
            let mut z = ZeroCheck::new(format!("killing_parallel_{}", k), &chart);
            'p: for i in 0..n {
                let d = cov_deriv_tm(&chart, &conn, &Section::basis(n, i), &s)?;
                for (c, e) in d.0.iter().enumerate() {
                    if !z.check(&[i, c], e) {
                        break 'p;
                    }
                }
            }
            par.push(z.finish());
        }
        checks.push(Verdict::all("killing_parallel", par));
    }
    let mut verdict = Verdict::all("riemann", checks);
    verdict.note = Some(
        if verdict.checks[0].passed() { "locally_maximally_homogeneous" } else { "not_locally_maximally_homogeneous" }.into(),
    );
    Ok(RiemannReport {
        levi_civita: lc,
        curvature,
        isometry: iso,
        connection: conn,
        classification: theorem_a.classification,
        verdict,
    })
}

/// Rebuild the connection from its representation on g and the splitting shifted into h;
/// the result must not change.
fn splitting_independence(g: &Algebroid, conn: &TMConnection, t: &[Section], n: usize) -> Result<Verdict> {
    if g.rank() == n {
        return Ok(Verdict::pass("splitting_independence").with_note("h is trivial"));
    }
    let rep_g = induced_rep_on_g(g, conn)?;
    let chart = g.chart();
    let shifted: Vec<Section> = t
        .iter()
        .enumerate()
        .map(|(k, tk)| {
            let mut s = tk.clone();
            let f = canon(&(Expr::one() + chart.coord((k + 1) % n)));
            s.0[n] = canon(&(&s.0[n] + &f));
            s
        })
        .collect();
    let rebuilt = connection_from_rep(g, &rep_g, &shifted)?;
    same_tm_connection("splitting_independence", chart, &rebuilt, conn)
}
