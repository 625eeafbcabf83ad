use crate::algebroid::Algebroid;
use crate::bundles::Section;
use crate::connections::{induced_rep_on_tm, is_flat_g, same_g_connection, Bundle, GConnection, TMConnection};
use crate::error::{Error, Result};
use crate::symcore::{canon, Expr};
use crate::verdict::{Verdict, ZeroCheck};

use super::check_cartan;

/// Check `# t(d_k) = d_k` for a map `t: TM -> g` given as `t[k] = t(d_k)`.
pub fn check_splitting(g: &Algebroid, t: &[Section]) -> Result<()> {
    let n = g.dim();
    if t.len() != n || t.iter().any(|s| s.rank() != g.rank()) {
        return Err(Error::Shape(format!("splitting must be {} sections of rank {}", n, g.rank())));
    }
    let mut z = ZeroCheck::new("splitting", g.chart());
    for (k, tk) in t.iter().enumerate() {
        let v = g.anchor_apply(tk)?;
        for i in 0..n {
            let delta = if i == k { Expr::one() } else { Expr::zero() };
            if !z.check(&[k, i], &(&v[i] - &delta)) {
                break;
            }
        }
    }
    z.finish().require(Error::NotSplitting)?;
    Ok(())
}

/// `nabla_V X = t(nbar_X V) + [tV, X]` for a splitting `t` and a representation `nbar`
/// of g on TM.
pub fn reductive_connection(g: &Algebroid, t: &[Section], rep_tm: &GConnection) -> Result<TMConnection> {
    if rep_tm.target() != Bundle::Tangent || rep_tm.target_rank() != g.dim() || rep_tm.rank() != g.rank() {
        return Err(Error::TargetMismatch("reductive construction needs a g-connection on TM".into()));
    }
    check_splitting(g, t)?;
    is_flat_g(g, rep_tm)?.require(Error::NotFlat)?;
    let (n, r) = (g.dim(), g.rank());
    let gamma = (0..n)
        .map(|i| {
            (0..r)
                .map(|a| {
                    let br = g.bracket(&t[i], &Section::basis(r, a))?;
                    Ok((0..r)
                        .map(|b| {
                            let mut terms: Vec<Expr> = (0..n).map(|k| rep_tm.a(a, i, k) * &t[k][b]).collect();
                            terms.push(br[b].clone());
                            canon(&Expr::sum(terms))
                        })
                        .collect())
                })
                .collect::<Result<Vec<Vec<Expr>>>>()
        })
        .collect::<Result<_>>()?;
    TMConnection::new(Bundle::Algebroid, gamma)
}

/// The reductive connection together with its postconditions: it is Cartan and its
/// induced representation on TM is the one it was built from.
pub fn reductive_report(g: &Algebroid, t: &[Section], rep_tm: &GConnection) -> Result<(TMConnection, Verdict)> {
    let conn = reductive_connection(g, t, rep_tm)?;
    let cartan = check_cartan(g, &conn)?;
    let back = induced_rep_on_tm(g, &conn)?;
    let same = same_g_connection("induced_rep_matches", g.chart(), &back, rep_tm)?;
    Ok((conn, Verdict::all("reductive", vec![cartan, same])))
}

/// Rebuild a Cartan connection from its representation on g and any splitting:
/// `nabla_V X = nbar_X (tV) + [tV, X]`.
pub fn connection_from_rep(g: &Algebroid, rep_g: &GConnection, t: &[Section]) -> Result<TMConnection> {
    if rep_g.target() != Bundle::Algebroid || rep_g.target_rank() != g.rank() || rep_g.rank() != g.rank() {
        return Err(Error::TargetMismatch("rebuild needs a g-connection on g".into()));
    }
    check_splitting(g, t)?;
    let (n, r) = (g.dim(), g.rank());
    let gamma = (0..n)
        .map(|i| {
            (0..r)
                .map(|a| {
                    let d = rep_g.along_frame(g, a, &t[i]);
                    let br = g.bracket(&t[i], &Section::basis(r, a))?;
                    Ok((0..r).map(|b| canon(&(&d[b] + &br[b]))).collect())
                })
                .collect::<Result<Vec<Vec<Expr>>>>()
        })
        .collect::<Result<_>>()?;
    TMConnection::new(Bundle::Algebroid, gamma)
}
