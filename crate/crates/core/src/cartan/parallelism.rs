use std::sync::Arc;

use crate::algebroid::LieAlgebra;
use crate::bundles::{Slot, TensorField};
use crate::connections::{curvature_tm, tensor_cov_deriv, Bundle, TMConnection};
use crate::error::{Error, Result};
use crate::symcore::matrix::{self, ExprMatrix};
use crate::symcore::{canon, differentiate, eval, Chart, Expr};
use crate::verdict::{Verdict, ZeroCheck};

/// An absolute parallelism `omega^a_i` on a chart, valued in a model Lie algebra.
#[derive(Clone, Debug)]
pub struct Parallelism {
    chart: Arc<Chart>,
    model: LieAlgebra,
    omega: ExprMatrix,
    inverse: ExprMatrix,
}

impl Parallelism {
    /// `omega[a][i]`; must be invertible at every sample point.
    pub fn new(chart: Arc<Chart>, model: LieAlgebra, omega: ExprMatrix) -> Result<Parallelism> {
        let n = chart.dim();
        if model.dim() != n || omega.len() != n || omega.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("parallelism must be {} x {} with a model algebra of dimension {}", n, n, n)));
        }
        let omega: ExprMatrix = omega.iter().map(|row| row.iter().map(canon).collect()).collect();
        let det = matrix::det(&omega);
        for p in chart.sample_points() {
            match eval(&det, p) {
                Ok(v) if v.abs() > 1e-12 => {}
                _ => return Err(Error::SingularParallelism { point: p.clone() }),
            }
        }
        let inverse = matrix::inverse(&omega)?;
        Ok(Parallelism { chart, model, omega, inverse })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn model(&self) -> &LieAlgebra {
        &self.model
    }

    pub fn omega(&self) -> &ExprMatrix {
        &self.omega
    }

    /// `(omega^{-1})[k][a]`.
    pub fn inverse(&self) -> &ExprMatrix {
        &self.inverse
    }

    /// `Omega^a_ij = d_i omega^a_j - d_j omega^a_i + f^a_bc omega^b_i omega^c_j`, as `[a][i][j]`.
    pub fn curvature(&self) -> TensorField {
        let n = self.chart.dim();
        let w = &self.omega;
        TensorField::from_fn(vec![Slot::UP_G, Slot::LOW_TM, Slot::LOW_TM], vec![n, n, n], |idx| {
            let (a, i, j) = (idx[0], idx[1], idx[2]);
            let mut terms = vec![differentiate(&w[a][j], i), -differentiate(&w[a][i], j)];
            for b in 0..n {
                for c in 0..n {
                    let f = self.model.structure(b, c, a);
                    if *f != crate::symcore::integer(0) {
                        terms.push(Expr::constant(f.clone()) * &w[b][i] * &w[c][j]);
                    }
                }
            }
            canon(&Expr::sum(terms))
        })
    }

    /// The flat connection making the `omega`-constant fields parallel:
    /// `Gamma^k_ij = (omega^{-1})^k_a d_i omega^a_j`.
    pub fn connection(&self) -> TMConnection {
        let n = self.chart.dim();
        let gamma = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| canon(&Expr::sum((0..n).map(|a| &self.inverse[k][a] * &differentiate(&self.omega[a][j], i)))))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        TMConnection::new(Bundle::Tangent, gamma).expect("square")
    }
}

#[derive(Clone, Debug)]
pub struct ParallelismReport {
    pub curvature: TensorField,
    pub connection: TMConnection,
    pub verdict: Verdict,
}

/// Curvature of the Cartan geometry, the self-tests of its flat connection `D`
/// (flatness and `omega(T_D) = d omega`), and the local symmetry verdict: the
/// TP-valued curvature `omega^{-1} Omega` must be `D`-parallel.
pub fn parallelism_report(p: &Parallelism) -> Result<ParallelismReport> {
    let chart = p.chart();
    let n = chart.dim();
    let omega_curv = p.curvature();
    let d = p.connection();
    let flat = curvature_tm(&d).all_zero("d_flat", chart);

    let mut td = ZeroCheck::new("torsion_is_d_omega", chart);
    'td: for a in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                let wt = Expr::sum((0..n).map(|k| &p.omega()[a][k] * &(d.g(i, j, k) - d.g(j, i, k))));
                let dw = differentiate(&p.omega()[a][j], i) - differentiate(&p.omega()[a][i], j);
                if !td.check(&[a, i, j], &(wt - dw)) {
                    break 'td;
                }
            }
        }
    }

    let structure_zero = omega_curv.all_zero("curvature_zero", chart);
    let tilde = TensorField::from_fn(vec![Slot::LOW_TM, Slot::LOW_TM, Slot::UP_TM], vec![n, n, n], |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        canon(&Expr::sum((0..n).map(|a| &p.inverse()[k][a] * omega_curv.get(&[a, i, j]))))
    });
    let theorem_c = tensor_cov_deriv(chart, &d, &tilde)?.all_zero("theorem_c", chart);
    let theorem_c = if theorem_c.passed() {
        theorem_c.with_note("locally_symmetric")
    } else {
        let note = if theorem_c.failed() { "not_locally_symmetric" } else { "undecided" };
        theorem_c.with_note(note)
    };
    let mut verdict = Verdict::all("parallelism", vec![flat, td.finish(), theorem_c]);
    if structure_zero.passed() {
        verdict.note = Some("maurer_cartan_holds".into());
    }
    // reported alongside, but a nonzero curvature does not fail the report
    verdict.checks.push(structure_zero);
    Ok(ParallelismReport { curvature: omega_curv, connection: d, verdict })
}
