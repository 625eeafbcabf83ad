//! Connections on trivialized bundles: ordinary (along vector fields) and along an algebroid.

use crate::algebroid::Algebroid;
use crate::bundles::{multi_indices, Section, Slot, Tag, TensorField, Variance};
use crate::error::{Error, Result};
use crate::symcore::{canon, differentiate, Chart, Expr};
use crate::verdict::{Verdict, ZeroCheck};

/// Which bundle a connection acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bundle {
    Algebroid,
    Tangent,
    Other,
}

impl Bundle {
    fn tag(self) -> Tag {
        match self {
            Bundle::Tangent => Tag::Tangent,
            _ => Tag::Algebroid,
        }
    }
}

type Coeffs = Vec<Vec<Vec<Expr>>>;

fn cube(d0: usize, d1: usize, d2: usize, mut f: impl FnMut(usize, usize, usize) -> Expr) -> Coeffs {
    (0..d0).map(|i| (0..d1).map(|a| (0..d2).map(|b| canon(&f(i, a, b))).collect()).collect()).collect()
}

/// Connection on a rank-r bundle along vector fields: `nabla_{d_i} e_a = gamma[i][a][b] e_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct TMConnection {
    target: Bundle,
    gamma: Coeffs,
}

impl TMConnection {
    pub fn new(target: Bundle, gamma: Coeffs) -> Result<TMConnection> {
        let r = gamma.first().map(|m| m.len()).unwrap_or(0);
        if gamma.iter().any(|m| m.len() != r || m.iter().any(|v| v.len() != r)) {
            return Err(Error::Shape("connection coefficients must be n x r x r".into()));
        }
        Ok(TMConnection { target, gamma: gamma.into_iter().map(|m| m.into_iter().map(|v| v.iter().map(canon).collect()).collect()).collect() })
    }

    pub fn zero(target: Bundle, n: usize, r: usize) -> TMConnection {
        TMConnection { target, gamma: vec![vec![vec![Expr::zero(); r]; r]; n] }
    }

    pub fn target(&self) -> Bundle {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn rank(&self) -> usize {
        self.gamma.first().map(|m| m.len()).unwrap_or(0)
    }

    pub fn gamma(&self) -> &Coeffs {
        &self.gamma
    }

    pub fn g(&self, i: usize, a: usize, b: usize) -> &Expr {
        &self.gamma[i][a][b]
    }

    pub fn with_target(mut self, target: Bundle) -> TMConnection {
        self.target = target;
        self
    }

    fn check(&self, chart: &Chart, rank: usize) -> Result<()> {
        if self.dim() != chart.dim() || self.rank() != rank {
            return Err(Error::Shape(format!(
                "connection is {} x {} but the chart/bundle is {} x {}",
                self.dim(),
                self.rank(),
                chart.dim(),
                rank
            )));
        }
        Ok(())
    }

    /// Check that this connection lives on the algebroid `g`.
    pub fn check_on(&self, g: &Algebroid) -> Result<()> {
        if self.target == Bundle::Tangent && !matches!(g.origin(), crate::algebroid::Origin::Tangent) {
            return Err(Error::TargetMismatch("connection on TM used where a connection on the algebroid is needed".into()));
        }
        self.check(g.chart(), g.rank())
    }

    /// `(nabla_{d_i} sigma)^b = d_i sigma^b + gamma[i][a][b] sigma^a`.
    pub fn along_coord(&self, i: usize, sigma: &Section) -> Section {
        let r = self.rank();
        Section(
            (0..r)
                .map(|b| {
                    let mut terms = vec![differentiate(&sigma[b], i)];
                    terms.extend((0..r).filter(|&a| !sigma[a].is_literal_zero()).map(|a| &self.gamma[i][a][b] * &sigma[a]));
                    canon(&Expr::sum(terms))
                })
                .collect(),
        )
    }
}

/// `nabla_V sigma = V^i (d_i sigma^b + gamma[i][a][b] sigma^a) e_b`.
pub fn cov_deriv_tm(chart: &Chart, conn: &TMConnection, v: &Section, sigma: &Section) -> Result<Section> {
    conn.check(chart, sigma.rank())?;
    if v.rank() != chart.dim() {
        return Err(Error::Shape("direction must be a vector field on the chart".into()));
    }
    let parts: Vec<(Expr, Section)> = (0..chart.dim())
        .filter(|&i| !v[i].is_literal_zero())
        .map(|i| (v[i].clone(), conn.along_coord(i, sigma)))
        .collect();
    let refs: Vec<(Expr, &Section)> = parts.iter().map(|(f, s)| (f.clone(), s)).collect();
    Ok(Section::combination(sigma.rank(), &refs))
}

/// Covariant derivative of a tensor with tangent slots only; the new lower slot is last.
pub fn tensor_cov_deriv(chart: &Chart, conn: &TMConnection, t: &TensorField) -> Result<TensorField> {
    let n = chart.dim();
    conn.check(chart, n)?;
    if t.slots().iter().any(|s| s.tag != Tag::Tangent) {
        return Err(Error::TargetMismatch("tensor_cov_deriv needs tangent slots only".into()));
    }
    if t.dims().iter().any(|&d| d != n) {
        return Err(Error::Shape("tangent slot dimension differs from chart dimension".into()));
    }
    let mut slots = t.slots().to_vec();
    slots.push(Slot::LOW_TM);
    let mut dims = t.dims().to_vec();
    dims.push(n);
    let k = t.order();
    Ok(TensorField::from_fn(slots, dims, |idx| {
        let (base, d) = (&idx[..k], idx[k]);
        let mut terms = vec![differentiate(t.get(base), d)];
        for (s, slot) in t.slots().iter().enumerate() {
            let mut j = base.to_vec();
            for c in 0..n {
                j[s] = c;
                let tc = t.get(&j);
                if tc.is_literal_zero() {
                    continue;
                }
                match slot.variance {
                    Variance::Upper => terms.push(conn.g(d, c, base[s]) * tc),
                    Variance::Lower => terms.push(-(conn.g(d, base[s], c) * tc)),
                }
            }
        }
        Expr::sum(terms)
    })
    .canon())
}

/// Curvature `R[i][j][a][b]`, with `R(d_i, d_j) e_a = R[i][j][a][b] e_b`.
pub fn curvature_tm(conn: &TMConnection) -> TensorField {
    let n = conn.dim();
    let r = conn.rank();
    let tag = conn.target.tag();
    let g = &conn.gamma;
    TensorField::from_fn(
        vec![Slot::LOW_TM, Slot::LOW_TM, Slot { variance: Variance::Lower, tag }, Slot { variance: Variance::Upper, tag }],
        vec![n, n, r, r],
        |idx| {
            let (i, j, a, b) = (idx[0], idx[1], idx[2], idx[3]);
            if i == j {
                return Expr::zero();
            }
            let mut terms = vec![differentiate(&g[j][a][b], i), -differentiate(&g[i][a][b], j)];
            for c in 0..r {
                terms.push(&g[j][a][c] * &g[i][c][b]);
                terms.push(-(&g[i][a][c] * &g[j][c][b]));
            }
            canon(&Expr::sum(terms))
        },
    )
}

pub fn is_flat_tm(chart: &Chart, conn: &TMConnection) -> Verdict {
    curvature_tm(conn).all_zero("flat", chart)
}

/// Connection along an algebroid: `nabla_{e_a} f_alpha = coeffs[a][alpha][beta] f_beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct GConnection {
    target: Bundle,
    coeffs: Coeffs,
}

impl GConnection {
    pub fn new(target: Bundle, coeffs: Coeffs) -> Result<GConnection> {
        let m = coeffs.first().map(|x| x.len()).unwrap_or(0);
        if coeffs.iter().any(|x| x.len() != m || x.iter().any(|v| v.len() != m)) {
            return Err(Error::Shape("g-connection coefficients must be r x m x m".into()));
        }
        Ok(GConnection { target, coeffs: coeffs.into_iter().map(|x| x.into_iter().map(|v| v.iter().map(canon).collect()).collect()).collect() })
    }

    pub fn zero(target: Bundle, r: usize, m: usize) -> GConnection {
        GConnection { target, coeffs: vec![vec![vec![Expr::zero(); m]; m]; r] }
    }

    pub fn target(&self) -> Bundle {
        self.target
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn target_rank(&self) -> usize {
        self.coeffs.first().map(|x| x.len()).unwrap_or(0)
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn a(&self, a: usize, alpha: usize, beta: usize) -> &Expr {
        &self.coeffs[a][alpha][beta]
    }

    fn check(&self, g: &Algebroid) -> Result<()> {
        if self.rank() != g.rank() {
            return Err(Error::Shape(format!("g-connection along rank {} used on an algebroid of rank {}", self.rank(), g.rank())));
        }
        Ok(())
    }

    fn check_self(&self, g: &Algebroid) -> Result<()> {
        self.check(g)?;
        if self.target != Bundle::Algebroid || self.target_rank() != g.rank() {
            return Err(Error::TargetMismatch("operation needs a g-connection on g itself".into()));
        }
        Ok(())
    }

    /// `nabla_{e_a} sigma`.
    pub fn along_frame(&self, g: &Algebroid, a: usize, sigma: &Section) -> Section {
        let m = self.target_rank();
        Section(
            (0..m)
                .map(|beta| {
                    let mut terms = vec![g.rho_apply(a, &sigma[beta])];
                    terms.extend(
                        (0..m).filter(|&al| !sigma[al].is_literal_zero()).map(|al| &self.coeffs[a][al][beta] * &sigma[al]),
                    );
                    canon(&Expr::sum(terms))
                })
                .collect(),
        )
    }
}

/// `nabla_X sigma = X^a (rho_a sigma^beta + A[a][alpha][beta] sigma^alpha) f_beta`.
pub fn cov_deriv_g(g: &Algebroid, conn: &GConnection, x: &Section, sigma: &Section) -> Result<Section> {
    conn.check(g)?;
    g.check_section(x)?;
    if sigma.rank() != conn.target_rank() {
        return Err(Error::Shape("section rank differs from the connection's bundle".into()));
    }
    let parts: Vec<(Expr, Section)> = (0..g.rank())
        .filter(|&a| !x[a].is_literal_zero())
        .map(|a| (x[a].clone(), conn.along_frame(g, a, sigma)))
        .collect();
    let refs: Vec<(Expr, &Section)> = parts.iter().map(|(f, s)| (f.clone(), s)).collect();
    Ok(Section::combination(sigma.rank(), &refs))
}

/// Curvature `R[a][b][alpha][beta]`, with `R(e_a, e_b) f_alpha = R[a][b][alpha][beta] f_beta`.
pub fn curvature_g(g: &Algebroid, conn: &GConnection) -> Result<TensorField> {
    conn.check(g)?;
    let r = g.rank();
    let m = conn.target_rank();
    let tag = conn.target.tag();
    let c = &conn.coeffs;
    Ok(TensorField::from_fn(
        vec![Slot::LOW_G, Slot::LOW_G, Slot { variance: Variance::Lower, tag }, Slot { variance: Variance::Upper, tag }],
        vec![r, r, m, m],
        |idx| {
            let (a, b, al, be) = (idx[0], idx[1], idx[2], idx[3]);
            if a == b {
                return Expr::zero();
            }
            let mut terms = vec![g.rho_apply(a, &c[b][al][be]), -g.rho_apply(b, &c[a][al][be])];
            for ga in 0..m {
                terms.push(&c[b][al][ga] * &c[a][ga][be]);
                terms.push(-(&c[a][al][ga] * &c[b][ga][be]));
            }
            for d in 0..r {
                terms.push(-(g.c(a, b, d) * &c[d][al][be]));
            }
            canon(&Expr::sum(terms))
        },
    ))
}

pub fn is_flat_g(g: &Algebroid, conn: &GConnection) -> Result<Verdict> {
    Ok(curvature_g(g, conn)?.all_zero("flat", g.chart()))
}

/// `nabla*_X Y = nabla_Y X + [X,Y]`.
pub fn dual_connection(g: &Algebroid, conn: &GConnection) -> Result<GConnection> {
    conn.check_self(g)?;
    let r = g.rank();
    Ok(GConnection { target: Bundle::Algebroid, coeffs: cube(r, r, r, |a, b, c| conn.a(b, a, c) + g.c(a, b, c)) })
}

/// `T[a][b][c]`: `T(e_a, e_b) = nabla_a e_b - nabla_b e_a - [e_a, e_b]`.
pub fn torsion_g(g: &Algebroid, conn: &GConnection) -> Result<TensorField> {
    conn.check_self(g)?;
    let r = g.rank();
    Ok(TensorField::from_fn(vec![Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![r, r, r], |idx| {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        canon(&(conn.a(a, b, c) - conn.a(b, a, c) - g.c(a, b, c)))
    }))
}

/// `nabla-bar_X Y = nabla_{#Y} X + [X,Y]`, a g-connection on g.
pub fn induced_rep_on_g(g: &Algebroid, conn: &TMConnection) -> Result<GConnection> {
    conn.check_on(g)?;
    let r = g.rank();
    let n = g.dim();
    Ok(GConnection {
        target: Bundle::Algebroid,
        coeffs: cube(r, r, r, |a, b, c| {
            let mut terms: Vec<Expr> = (0..n).map(|i| g.rho(i, b) * conn.g(i, a, c)).collect();
            terms.push(g.c(a, b, c).clone());
            Expr::sum(terms)
        }),
    })
}

/// `nabla-bar_X V = #nabla_V X + [#X, V]`, a g-connection on TM.
pub fn induced_rep_on_tm(g: &Algebroid, conn: &TMConnection) -> Result<GConnection> {
    induced_rep_on_tm_signed(g, conn, 1)
}

fn induced_rep_on_tm_signed(g: &Algebroid, conn: &TMConnection, bracket_sign: i64) -> Result<GConnection> {
    conn.check_on(g)?;
    let r = g.rank();
    let n = g.dim();
    Ok(GConnection {
        target: Bundle::Tangent,
        coeffs: cube(r, n, n, |a, j, k| {
            let mut terms: Vec<Expr> = (0..r).map(|b| g.rho(k, b) * conn.g(j, a, b)).collect();
            terms.push(Expr::int(-bracket_sign) * differentiate(g.rho(k, a), j));
            Expr::sum(terms)
        }),
    })
}

/// `# nabla-bar_X Y = nabla-bar_X #Y` on frame pairs. Holds for every connection.
pub fn check_anchor_equivariance(g: &Algebroid, conn: &TMConnection) -> Result<Verdict> {
    anchor_equivariance_impl(g, conn, 1)
}

/// The same check run against a deliberately sign-flipped induced representation on TM.
/// Exists so tests can confirm the check detects a broken implementation.
#[doc(hidden)]
pub fn check_anchor_equivariance_mutant(g: &Algebroid, conn: &TMConnection) -> Result<Verdict> {
    anchor_equivariance_impl(g, conn, -1)
}

fn anchor_equivariance_impl(g: &Algebroid, conn: &TMConnection, sign: i64) -> Result<Verdict> {
    let on_g = induced_rep_on_g(g, conn)?;
    let on_tm = induced_rep_on_tm_signed(g, conn, sign)?;
    let r = g.rank();
    let mut z = ZeroCheck::new("anchor_equivariance", g.chart());
    'outer: for a in 0..r {
        for b in 0..r {
            let lhs = g.anchor_apply(&on_g.along_frame(g, a, &Section::basis(r, b)))?;
            let rhs = on_tm.along_frame(g, a, &g.anchor_column(b));
            for k in 0..g.dim() {
                if !z.check(&[a, b, k], &(&lhs[k] - &rhs[k])) {
                    break 'outer;
                }
            }
        }
    }
    Ok(z.finish())
}

/// Curvature of an anchored fibre map `phi: g -> h` (`phi(e_a) = phi[alpha][a] f_alpha`):
/// `curv(e_a, e_b) = [phi e_a, phi e_b]_h - phi [e_a, e_b]_g`, components `[a][b][alpha]`.
pub fn morphism_curvature(phi: &[Vec<Expr>], g: &Algebroid, h: &Algebroid) -> Result<TensorField> {
    let (r, s) = (g.rank(), h.rank());
    if phi.len() != s || phi.iter().any(|row| row.len() != r) {
        return Err(Error::Shape(format!("fibre map must be {} x {}", s, r)));
    }
    if g.dim() != h.dim() {
        return Err(Error::Shape("algebroids live on different charts".into()));
    }
    let image = |x: &Section| -> Section {
        Section((0..s).map(|al| canon(&Expr::sum((0..r).map(|a| &phi[al][a] * &x[a])))).collect())
    };
    let cols: Vec<Section> = (0..r).map(|a| image(&Section::basis(r, a))).collect();
    let mut z = ZeroCheck::new("anchor_compatibility", g.chart());
    for a in 0..r {
        let lhs = h.anchor_apply(&cols[a])?;
        for i in 0..g.dim() {
            z.check(&[a, i], &(&lhs[i] - g.rho(i, a)));
        }
    }
    z.finish_or(Error::AnchorIncompatible)?;
    let mut out = TensorField::from_fn(vec![Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![r, r, s], |_| Expr::zero());
    for a in 0..r {
        for b in (a + 1)..r {
            let v = &h.bracket(&cols[a], &cols[b])? - &image(&g.frame_bracket(a, b));
            for al in 0..s {
                out.set(&[a, b, al], v[al].clone());
                out.set(&[b, a, al], canon(&-&v[al]));
            }
        }
    }
    Ok(out)
}

/// Representations used to differentiate algebroid tensors: one for algebroid-tagged
/// slots, one for tangent-tagged slots.
#[derive(Clone, Copy)]
pub struct Reps<'a> {
    pub on_g: Option<&'a GConnection>,
    pub on_tm: Option<&'a GConnection>,
}

/// Covariant derivative along the algebroid of a tensor field; the new lower algebroid slot is last.
pub fn g_tensor_cov_deriv(g: &Algebroid, reps: Reps<'_>, t: &TensorField) -> Result<TensorField> {
    let r = g.rank();
    let mut per_slot = Vec::new();
    for (s, slot) in t.slots().iter().enumerate() {
        let rep = match slot.tag {
            Tag::Algebroid => reps.on_g,
            Tag::Tangent => reps.on_tm,
        }
        .ok_or_else(|| Error::TargetMismatch(format!("no representation supplied for slot {}", s)))?;
        rep.check(g)?;
        if rep.target_rank() != t.dims()[s] {
            return Err(Error::Shape(format!("slot {} dimension differs from its representation", s)));
        }
        per_slot.push(rep);
    }
    let mut slots = t.slots().to_vec();
    slots.push(Slot::LOW_G);
    let mut dims = t.dims().to_vec();
    dims.push(r);
    let k = t.order();
    Ok(TensorField::from_fn(slots, dims, |idx| {
        let (base, d) = (&idx[..k], idx[k]);
        let mut terms = vec![g.rho_apply(d, t.get(base))];
        for (s, slot) in t.slots().iter().enumerate() {
            let rep = per_slot[s];
            let mut j = base.to_vec();
            for c in 0..t.dims()[s] {
                j[s] = c;
                let tc = t.get(&j);
                if tc.is_literal_zero() {
                    continue;
                }
                match slot.variance {
                    Variance::Upper => terms.push(rep.a(d, c, base[s]) * tc),
                    Variance::Lower => terms.push(-(rep.a(d, base[s], c) * tc)),
                }
            }
        }
        canon(&Expr::sum(terms))
    }))
}

/// Pointwise difference of two g-connections with the same shape, as a verdict.
pub fn same_g_connection(name: &str, chart: &Chart, a: &GConnection, b: &GConnection) -> Result<Verdict> {
    if a.coeffs.len() != b.coeffs.len() || a.target_rank() != b.target_rank() {
        return Err(Error::Shape("g-connections have different shapes".into()));
    }
    let dims = [a.rank(), a.target_rank(), a.target_rank()];
    let mut z = ZeroCheck::new(name, chart);
    for idx in multi_indices(&dims) {
        if !z.check(&idx, &(a.a(idx[0], idx[1], idx[2]) - b.a(idx[0], idx[1], idx[2]))) {
            break;
        }
    }
    Ok(z.finish())
}

/// Pointwise difference of two connections along vector fields, as a verdict.
pub fn same_tm_connection(name: &str, chart: &Chart, a: &TMConnection, b: &TMConnection) -> Result<Verdict> {
    if a.dim() != b.dim() || a.rank() != b.rank() {
        return Err(Error::Shape("connections have different shapes".into()));
    }
    let dims = [a.dim(), a.rank(), a.rank()];
    let mut z = ZeroCheck::new(name, chart);
    for idx in multi_indices(&dims) {
        if !z.check(&idx, &(a.g(idx[0], idx[1], idx[2]) - b.g(idx[0], idx[1], idx[2]))) {
            break;
        }
    }
    Ok(z.finish())
}
