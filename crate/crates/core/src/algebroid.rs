//! Lie algebroids on a chart with a global frame: anchor, bracket, axioms and builders.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::bundles::{directional, vf_bracket, Section, Slot, Symmetry, TensorField};
use crate::error::{Error, Result};
use crate::symcore::matrix::{self, ExprMatrix};
use crate::symcore::{canon, differentiate, eval, integer, Chart, Expr, Rational};
use crate::verdict::{Verdict, Witness, ZeroCheck};

/// Finite-dimensional Lie algebra given by exact structure constants `f[a][b][c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    f: Vec<Vec<Vec<Rational>>>,
}

impl LieAlgebra {
    pub fn new(f: Vec<Vec<Vec<Rational>>>) -> Result<LieAlgebra> {
        let dim = f.len();
        if f.iter().any(|row| row.len() != dim || row.iter().any(|v| v.len() != dim)) {
            return Err(Error::Shape("structure constants must be dim x dim x dim".into()));
        }
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    if !(&f[a][b][c] + &f[b][a][c]).is_zero() {
                        return Err(Error::NotLieAlgebra(format!("f[{}][{}][{}] is not antisymmetric", a, b, c)));
                    }
                }
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for e in 0..dim {
                        let mut s = Rational::zero();
                        for d in 0..dim {
                            s += &f[a][b][d] * &f[d][c][e] + &f[b][c][d] * &f[d][a][e] + &f[c][a][d] * &f[d][b][e];
                        }
                        if !s.is_zero() {
                            return Err(Error::NotLieAlgebra(format!("Jacobi fails for ({}, {}, {})", a, b, c)));
                        }
                    }
                }
            }
        }
        Ok(LieAlgebra { dim, f })
    }

    pub fn from_ints(f: &[Vec<Vec<i64>>]) -> Result<LieAlgebra> {
        LieAlgebra::new(f.iter().map(|m| m.iter().map(|v| v.iter().map(|&x| integer(x)).collect()).collect()).collect())
    }

    pub fn abelian(dim: usize) -> LieAlgebra {
        LieAlgebra { dim, f: vec![vec![vec![Rational::zero(); dim]; dim]; dim] }
    }

    /// so(3) with `[e1,e2] = e3` and cyclic.
    pub fn so3() -> LieAlgebra {
        let mut f = vec![vec![vec![0i64; 3]; 3]; 3];
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            f[a][b][c] = 1;
            f[b][a][c] = -1;
        }
        LieAlgebra::from_ints(&f).expect("so(3)")
    }

    /// The affine algebra of the line, `[e1,e2] = e2`.
    pub fn aff1() -> LieAlgebra {
        let mut f = vec![vec![vec![0i64; 2]; 2]; 2];
        f[0][1][1] = 1;
        f[1][0][1] = -1;
        LieAlgebra::from_ints(&f).expect("aff(1)")
    }

    /// sl(2) in the basis realized by `d/dx, x d/dx, x^2 d/dx`.
    pub fn sl2() -> LieAlgebra {
        let mut f = vec![vec![vec![0i64; 3]; 3]; 3];
        // [d, x d] = d, [d, x^2 d] = 2 x d, [x d, x^2 d] = x^2 d
        let mut set = |a: usize, b: usize, c: usize, v: i64| {
            f[a][b][c] = v;
            f[b][a][c] = -v;
        };
        set(0, 1, 0, 1);
        set(0, 2, 1, 2);
        set(1, 2, 2, 1);
        LieAlgebra::from_ints(&f).expect("sl(2)")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self, a: usize, b: usize, c: usize) -> &Rational {
        &self.f[a][b][c]
    }

    pub fn constants(&self) -> &[Vec<Vec<Rational>>] {
        &self.f
    }
}

/// How an algebroid was produced; some pipelines use this to report extra facts.
#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    Direct,
    Tangent,
    Action(LieAlgebra),
    Poisson,
    Foliation,
    Derived,
}

/// Rank-r Lie algebroid over a chart: anchor `rho[i][a]` and structure functions `c[a][b][c]`.
#[derive(Clone, Debug)]
pub struct Algebroid {
    chart: Arc<Chart>,
    rank: usize,
    anchor: Vec<Vec<Expr>>,
    structure: Vec<Vec<Vec<Expr>>>,
    origin: Origin,
}

impl Algebroid {
    pub fn new(chart: Arc<Chart>, anchor: Vec<Vec<Expr>>, structure: Vec<Vec<Vec<Expr>>>) -> Result<Algebroid> {
        let n = chart.dim();
        let rank = structure.len();
        if anchor.len() != n || anchor.iter().any(|row| row.len() != rank) {
            return Err(Error::Shape(format!("anchor must be {} x {}", n, rank)));
        }
        if structure.iter().any(|m| m.len() != rank || m.iter().any(|v| v.len() != rank)) {
            return Err(Error::Shape(format!("structure functions must be {} x {} x {}", rank, rank, rank)));
        }
        let canon2 = |m: Vec<Vec<Expr>>| m.into_iter().map(|r| r.iter().map(canon).collect()).collect();
        Ok(Algebroid {
            chart,
            rank,
            anchor: canon2(anchor),
            structure: structure.into_iter().map(canon2).collect(),
            origin: Origin::Direct,
        })
    }

    pub fn with_origin(mut self, origin: Origin) -> Algebroid {
        self.origin = origin;
        self
    }

    /// The tangent algebroid: identity anchor, coordinate frame commutes.
    pub fn tangent(chart: Arc<Chart>) -> Algebroid {
        let n = chart.dim();
        Algebroid {
            anchor: matrix::identity(n),
            structure: vec![matrix::zeros(n, n); n],
            rank: n,
            chart,
            origin: Origin::Tangent,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn chart_arc(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// Same data on a chart with different sampling.
    pub fn with_chart(&self, chart: Arc<Chart>) -> Algebroid {
        Algebroid { chart, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn anchor(&self) -> &[Vec<Expr>] {
        &self.anchor
    }

    pub fn rho(&self, i: usize, a: usize) -> &Expr {
        &self.anchor[i][a]
    }

    pub fn structure(&self) -> &[Vec<Vec<Expr>>] {
        &self.structure
    }

    pub fn c(&self, a: usize, b: usize, c: usize) -> &Expr {
        &self.structure[a][b][c]
    }

    /// `#e_a` as a vector field.
    pub fn anchor_column(&self, a: usize) -> Section {
        Section((0..self.dim()).map(|i| self.anchor[i][a].clone()).collect())
    }

    /// Derivative of a function along `#e_a`.
    pub fn rho_apply(&self, a: usize, f: &Expr) -> Expr {
        directional(&self.anchor_column(a), f)
    }

    pub fn check_section(&self, x: &Section) -> Result<()> {
        if x.rank() != self.rank {
            return Err(Error::Shape(format!("section of rank {} on an algebroid of rank {}", x.rank(), self.rank)));
        }
        Ok(())
    }

    /// `#X = rho^i_a X^a d_i`.
    pub fn anchor_apply(&self, x: &Section) -> Result<Section> {
        self.check_section(x)?;
        Ok(Section(
            (0..self.dim())
                .map(|i| canon(&Expr::sum((0..self.rank).map(|a| &self.anchor[i][a] * &x.0[a]))))
                .collect(),
        ))
    }

    /// `[X,Y]^c = #X(Y^c) - #Y(X^c) + c^c_{ab} X^a Y^b`.
    pub fn bracket(&self, x: &Section, y: &Section) -> Result<Section> {
        let ax = self.anchor_apply(x)?;
        let ay = self.anchor_apply(y)?;
        Ok(Section(
            (0..self.rank)
                .map(|c| {
                    let mut terms = vec![directional(&ax, &y.0[c]), -directional(&ay, &x.0[c])];
                    for a in 0..self.rank {
                        if x.0[a].is_literal_zero() {
                            continue;
                        }
                        for b in 0..self.rank {
                            if y.0[b].is_literal_zero() || self.structure[a][b][c].is_literal_zero() {
                                continue;
                            }
                            terms.push(&self.structure[a][b][c] * &x.0[a] * &y.0[b]);
                        }
                    }
                    canon(&Expr::sum(terms))
                })
                .collect(),
        ))
    }

    /// `[e_a, e_b]` as a section.
    pub fn frame_bracket(&self, a: usize, b: usize) -> Section {
        Section(self.structure[a][b].clone())
    }

    /// Check the algebroid axioms on the frame.
    pub fn validate(&self) -> Verdict {
        let r = self.rank;
        let n = self.dim();
        let chart = self.chart();

        let mut anti = ZeroCheck::new("antisymmetry", chart);
        'anti: for a in 0..r {
            for b in a..r {
                for c in 0..r {
                    if !anti.check(&[a, b, c], &(&self.structure[a][b][c] + &self.structure[b][a][c])) {
                        break 'anti;
                    }
                }
            }
        }

        let mut hom = ZeroCheck::new("anchor_hom", chart);
        'hom: for a in 0..r {
            for b in (a + 1)..r {
                for j in 0..n {
                    let mut terms: Vec<Expr> = (0..r).map(|c| &self.anchor[j][c] * &self.structure[a][b][c]).collect();
                    terms.push(-self.rho_apply(a, &self.anchor[j][b]));
                    terms.push(self.rho_apply(b, &self.anchor[j][a]));
                    if !hom.check(&[a, b, j], &Expr::sum(terms)) {
                        break 'hom;
                    }
                }
            }
        }

        let mut jac = ZeroCheck::new("jacobi", chart);
        'jac: for a in 0..r {
            for b in (a + 1)..r {
                for c in (b + 1)..r {
                    let e = |k| Section::basis(r, k);
                    let t1 = self.bracket(&self.frame_bracket(a, b), &e(c)).expect("shape");
                    let t2 = self.bracket(&self.frame_bracket(b, c), &e(a)).expect("shape");
                    let t3 = self.bracket(&self.frame_bracket(c, a), &e(b)).expect("shape");
                    for d in 0..r {
                        if !jac.check(&[a, b, c, d], &(&t1[d] + &t2[d] + &t3[d])) {
                            break 'jac;
                        }
                    }
                }
            }
        }

        let mut leib = ZeroCheck::new("leibniz", chart);
        'leib: for a in 0..r {
            for b in 0..r {
                for k in 0..n {
                    let f = chart.coord(k);
                    let fy = Section::basis(r, b).scale(&f);
                    let lhs = self.bracket(&Section::basis(r, a), &fy).expect("shape");
                    let rhs = &self.frame_bracket(a, b).scale(&f) + &Section::basis(r, b).scale(&self.rho_apply(a, &f));
                    let d = &lhs - &rhs;
                    for c in 0..r {
                        if !leib.check(&[a, b, k, c], &d[c]) {
                            break 'leib;
                        }
                    }
                }
            }
        }

        Verdict::all("algebroid_axioms", vec![leib.finish(), anti.finish(), jac.finish(), hom.finish()])
    }

    /// Numeric rank of the anchor at `p` (singular values above 1e-9).
    pub fn orbit_rank(&self, p: &[f64]) -> Result<usize> {
        let n = self.dim();
        let mut m = DMatrix::<f64>::zeros(n, self.rank);
        for i in 0..n {
            for a in 0..self.rank {
                m[(i, a)] = eval(&self.anchor[i][a], p)?;
            }
        }
        Ok(numeric_rank(m))
    }

    /// Anchor rank at every sample point, plus transitivity and regularity flags.
    pub fn orbit_report(&self) -> Result<OrbitReport> {
        let mut ranks = Vec::new();
        for p in self.chart.sample_points() {
            ranks.push(self.orbit_rank(p)?);
        }
        let transitive = ranks.iter().all(|&k| k == self.dim());
        let regular = ranks.windows(2).all(|w| w[0] == w[1]);
        Ok(OrbitReport { ranks, transitive, regular })
    }

    /// Same algebroid in the frame `e'_a = P[b][a] e_b`; `P` must be invertible on the box.
    pub fn frame_change(&self, p: &ExprMatrix) -> Result<Algebroid> {
        let r = self.rank;
        if p.len() != r || p.iter().any(|row| row.len() != r) {
            return Err(Error::Shape("frame change must be rank x rank".into()));
        }
        let pinv = matrix::inverse(p)?;
        let cols: Vec<Section> = (0..r).map(|a| Section((0..r).map(|b| p[b][a].clone()).collect())).collect();
        let anchor = matrix::matmul(&self.anchor, p);
        let mut structure = vec![vec![vec![Expr::zero(); r]; r]; r];
        for a in 0..r {
            for b in (a + 1)..r {
                let br = self.bracket(&cols[a], &cols[b])?;
                let coeffs = matrix::apply(&pinv, &br.0);
                for c in 0..r {
                    structure[b][a][c] = canon(&-&coeffs[c]);
                    structure[a][b][c] = coeffs[c].clone();
                }
            }
        }
        Ok(Algebroid { chart: self.chart.clone(), rank: r, anchor, structure, origin: Origin::Derived })
    }
}

pub(crate) fn numeric_rank(m: DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-9).count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitReport {
    pub ranks: Vec<usize>,
    pub transitive: bool,
    pub regular: bool,
}

/// Action algebroid of a Lie algebra acting through the given vector fields.
pub fn build_action_algebroid(chart: Arc<Chart>, algebra: &LieAlgebra, fields: &[Section]) -> Result<Algebroid> {
    let r = algebra.dim();
    if fields.len() != r {
        return Err(Error::Shape(format!("{} action fields for a {}-dimensional algebra", fields.len(), r)));
    }
    for a in 0..r {
        for b in (a + 1)..r {
            let br = vf_bracket(&chart, &fields[a], &fields[b])?;
            let mut z = ZeroCheck::new("action", &chart);
            for i in 0..chart.dim() {
                let rhs = Expr::sum((0..r).map(|c| Expr::constant(algebra.structure(a, b, c).clone()) * &fields[c][i]));
                z.check(&[i], &(&br[i] - rhs));
            }
            z.finish_or(|witness| Error::NotAction { a, b, witness })?;
        }
    }
    let anchor = (0..chart.dim()).map(|i| (0..r).map(|a| fields[a][i].clone()).collect()).collect();
    let structure = algebra
        .constants()
        .iter()
        .map(|m| m.iter().map(|v| v.iter().map(|c| Expr::constant(c.clone())).collect()).collect())
        .collect();
    Ok(Algebroid::new(chart, anchor, structure)?.with_origin(Origin::Action(algebra.clone())))
}

/// Cotangent algebroid of a Poisson bivector `pi[i][j]`, in the frame `dx^a`.
///
/// Anchor `#dx^a = Pi^{ai} d_i`, structure `[dx^a, dx^b] = d_k Pi^{ab} dx^k`.
pub fn build_poisson_algebroid(chart: Arc<Chart>, pi: &TensorField) -> Result<Algebroid> {
    let n = chart.dim();
    if pi.slots() != [Slot::UP_TM, Slot::UP_TM] || pi.dims() != [n, n] {
        return Err(Error::Shape("Poisson tensor must be a (2,0) tensor on the chart".into()));
    }
    let anti = pi.check_symmetry(&chart, Symmetry::Antisymmetric(0, 1))?;
    if let Some(w) = anti.witness {
        return Err(Error::NotAntisymmetric(w));
    }
    if let Some((i, j, k, witness)) = poisson_jacobi_defect(&chart, pi) {
        return Err(Error::NotPoisson { i, j, k, witness });
    }
    let p = |i: usize, j: usize| pi.get(&[i, j]).clone();
    let anchor = (0..n).map(|i| (0..n).map(|a| p(a, i)).collect()).collect();
    let structure = (0..n)
        .map(|a| (0..n).map(|b| (0..n).map(|k| differentiate(&p(a, b), k)).collect()).collect())
        .collect();
    Ok(Algebroid::new(chart, anchor, structure)?.with_origin(Origin::Poisson))
}

/// First failing triple of the cyclic sum `Pi^{il} d_l Pi^{jk} + cyclic`, if any.
pub fn poisson_jacobi_defect(chart: &Chart, pi: &TensorField) -> Option<(usize, usize, usize, Witness)> {
    let n = chart.dim();
    let p = |i: usize, j: usize| pi.get(&[i, j]).clone();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let term = |i: usize, j: usize, k: usize| {
                    Expr::sum((0..n).map(|l| p(i, l) * differentiate(&p(j, k), l)))
                };
                let e = term(i, j, k) + term(j, k, i) + term(k, i, j);
                let mut z = ZeroCheck::new("poisson", chart);
                z.check(&[i, j, k], &e);
                if let Some(w) = z.finish().witness {
                    return Some((i, j, k, w));
                }
            }
        }
    }
    None
}

/// Subalgebroid of the tangent algebroid spanned by a pointwise independent, involutive frame.
pub fn build_foliation_algebroid(chart: Arc<Chart>, frame: &[Section]) -> Result<Algebroid> {
    let n = chart.dim();
    let k = frame.len();
    for v in frame {
        if v.rank() != n {
            return Err(Error::Shape("frame vector has the wrong number of components".into()));
        }
    }
    // pointwise independence
    for p in chart.sample_points() {
        let mut m = DMatrix::<f64>::zeros(n, k);
        let mut ok = true;
        for a in 0..k {
            for i in 0..n {
                match eval(&frame[a][i], p) {
                    Ok(v) => m[(i, a)] = v,
                    Err(_) => ok = false,
                }
            }
        }
        if !ok || numeric_rank(m) < k {
            return Err(Error::DegenerateFrame { point: p.clone() });
        }
    }
    let solver = FrameSolver::new(&chart, frame)?;
    let mut structure = vec![vec![vec![Expr::zero(); k]; k]; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let w = vf_bracket(&chart, &frame[a], &frame[b])?;
            let coeffs = solver.solve(&w).map_err(|witness| Error::NotIntegrable { witness })?;
            for c in 0..k {
                structure[a][b][c] = coeffs[c].clone();
                structure[b][a][c] = canon(&-&coeffs[c]);
            }
        }
    }
    let anchor = (0..n).map(|i| (0..k).map(|a| frame[a][i].clone()).collect()).collect();
    Ok(Algebroid::new(chart, anchor, structure)?.with_origin(Origin::Foliation))
}

/// Expresses vector fields in a pointwise independent frame using a nonsingular k x k minor.
struct FrameSolver<'a> {
    chart: &'a Chart,
    frame: &'a [Section],
    rows: Vec<usize>,
    inverse: ExprMatrix,
}

impl<'a> FrameSolver<'a> {
    fn new(chart: &'a Chart, frame: &'a [Section]) -> Result<FrameSolver<'a>> {
        let n = chart.dim();
        let k = frame.len();
        for rows in combinations(n, k) {
            let minor: ExprMatrix = rows.iter().map(|&i| (0..k).map(|a| frame[a][i].clone()).collect()).collect();
            let det = matrix::det(&minor);
            let nonsingular = chart
                .sample_points()
                .iter()
                .all(|p| eval(&det, p).map(|v| v.abs() > 1e-9).unwrap_or(false));
            if nonsingular {
                let inverse = matrix::inverse(&minor)?;
                return Ok(FrameSolver { chart, frame, rows, inverse });
            }
        }
        Err(Error::DegenerateFrame { point: chart.sample_points()[0].clone() })
    }

    fn solve(&self, w: &Section) -> std::result::Result<Vec<Expr>, Witness> {
        let rhs: Vec<Expr> = self.rows.iter().map(|&i| w[i].clone()).collect();
        let coeffs = matrix::apply(&self.inverse, &rhs);
        let mut z = ZeroCheck::new("closure", self.chart);
        for i in 0..self.chart.dim() {
            let fit = Expr::sum(coeffs.iter().zip(self.frame).map(|(c, v)| c * &v[i]));
            z.check(&[i], &(&w[i] - fit));
        }
        match z.finish().witness {
            Some(wit) => Err(wit),
            None => Ok(coeffs),
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}
