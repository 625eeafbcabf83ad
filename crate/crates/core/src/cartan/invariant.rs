//! Invariant calculus on a Cartan algebroid: the fundamental operator `D` and the
//! exterior derivative of representation-valued algebroid forms.
//!
//! A k-form valued in a rank-m representation is a tensor with k lower algebroid
//! slots followed by one upper slot of dimension m.

use crate::algebroid::Algebroid;
use crate::bundles::{multi_indices, Slot, TensorField, Variance};
use crate::connections::{is_flat_g, Bundle, GConnection};
use crate::error::{Error, Result};
use crate::symcore::{canon, Expr};
use crate::verdict::{Verdict, ZeroCheck};

/// The form degree of a representation-valued form, after shape checks.
pub fn form_degree(g: &Algebroid, e: &GConnection, theta: &TensorField) -> Result<usize> {
    let k = theta.order().checked_sub(1).ok_or_else(|| Error::Shape("a form needs a value slot".into()))?;
    let ok = theta.slots()[..k].iter().all(|s| *s == Slot::LOW_G)
        && theta.dims()[..k].iter().all(|&d| d == g.rank())
        && theta.slots()[k].variance == Variance::Upper
        && theta.dims()[k] == e.target_rank();
    if !ok || e.rank() != g.rank() {
        return Err(Error::Shape("form must have k lower algebroid slots and one value slot".into()));
    }
    Ok(k)
}

/// Trivial representation on functions: `rho_X f = #X f`.
pub fn scalar_rep(g: &Algebroid) -> GConnection {
    GConnection::zero(Bundle::Other, g.rank(), 1)
}

/// The tautological form `omega(X) = X`.
pub fn tautological_form(g: &Algebroid) -> TensorField {
    let r = g.rank();
    TensorField::from_fn(vec![Slot::LOW_G, Slot::UP_G], vec![r, r], |idx| if idx[0] == idx[1] { Expr::one() } else { Expr::zero() })
}

fn require_flat(g: &Algebroid, rep: &GConnection) -> Result<()> {
    is_flat_g(g, rep)?.require(Error::NotFlat)?;
    Ok(())
}

fn check_alternating(g: &Algebroid, theta: &TensorField, k: usize) -> Result<()> {
    if k < 2 {
        return Ok(());
    }
    let mut z = ZeroCheck::new("alternating", g.chart());
    for idx in multi_indices(theta.dims()) {
        let mut sw = idx.clone();
        sw.swap(0, 1);
        z.check(&idx, &(theta.get(&idx) + theta.get(&sw)));
    }
    z.finish().require(Error::NotAntisymmetric)?;
    Ok(())
}

/// `<D theta, X> = rho_X theta` in the tensor-product representation of `Lambda^k g* (x) E`,
/// with `on_g` acting on the form slots and `on_e` on the value slot. The new slot is last.
pub fn fundamental_operator(g: &Algebroid, on_g: &GConnection, on_e: &GConnection, theta: &TensorField) -> Result<TensorField> {
    let k = form_degree(g, on_e, theta)?;
    if on_g.target_rank() != g.rank() {
        return Err(Error::TargetMismatch("form slots need a representation on g".into()));
    }
    require_flat(g, on_g)?;
    require_flat(g, on_e)?;
    Ok(d_operator(g, on_g, on_e, theta, k))
}

fn d_operator(g: &Algebroid, on_g: &GConnection, on_e: &GConnection, theta: &TensorField, k: usize) -> TensorField {
    let r = g.rank();
    let m = on_e.target_rank();
    let mut slots = theta.slots().to_vec();
    slots.push(Slot::LOW_G);
    let mut dims = theta.dims().to_vec();
    dims.push(r);
    TensorField::from_fn(slots, dims, |idx| {
        let (base, x) = (&idx[..=k], idx[k + 1]);
        let beta = base[k];
        let mut terms = vec![g.rho_apply(x, theta.get(base))];
        let mut j = base.to_vec();
        for al in 0..m {
            j[k] = al;
            terms.push(on_e.a(x, al, beta) * theta.get(&j));
        }
        for s in 0..k {
            let mut j = base.to_vec();
            for c in 0..r {
                j[s] = c;
                terms.push(-(on_g.a(x, base[s], c) * theta.get(&j)));
            }
        }
        canon(&Expr::sum(terms))
    })
}

/// Koszul formula on frames, `k <= 2`:
/// `d theta(X_0..X_k) = sum (-1)^i rho_{X_i} theta(..^i..) + sum_{i<j} (-1)^{i+j} theta([X_i,X_j], ..^i..^j..)`.
pub fn exterior_derivative(g: &Algebroid, on_e: &GConnection, theta: &TensorField) -> Result<TensorField> {
    let k = form_degree(g, on_e, theta)?;
    if k > 2 {
        return Err(Error::Degree(k));
    }
    require_flat(g, on_e)?;
    check_alternating(g, theta, k)?;
    Ok(koszul(g, on_e, theta, k))
}

fn koszul(g: &Algebroid, on_e: &GConnection, theta: &TensorField, k: usize) -> TensorField {
    let r = g.rank();
    let m = on_e.target_rank();
    let mut slots = vec![Slot::LOW_G; k + 1];
    slots.push(theta.slots()[k]);
    let mut dims = vec![r; k + 1];
    dims.push(m);
    TensorField::from_fn(slots, dims, |idx| {
        let (xs, beta) = (&idx[..=k], idx[k + 1]);
        let mut terms = Vec::new();
        for i in 0..=k {
            let sign = if i % 2 == 0 { Expr::one() } else { Expr::int(-1) };
            let rest: Vec<usize> = xs.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &a)| a).collect();
            // rho_{e_a} applied to the value section theta(rest), component beta
            let mut inner = vec![g.rho_apply(xs[i], &value(theta, &rest, beta))];
            for al in 0..m {
                inner.push(on_e.a(xs[i], al, beta) * value(theta, &rest, al));
            }
            terms.push(sign * Expr::sum(inner));
        }
        for i in 0..=k {
            for j in (i + 1)..=k {
                let sign = if (i + j) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
                let rest: Vec<usize> =
                    xs.iter().enumerate().filter(|&(p, _)| p != i && p != j).map(|(_, &a)| a).collect();
                for c in 0..r {
                    let coef = g.c(xs[i], xs[j], c);
                    if coef.is_literal_zero() {
                        continue;
                    }
                    let mut args = vec![c];
                    args.extend_from_slice(&rest);
                    terms.push(&sign * &(coef * &value(theta, &args, beta)));
                }
            }
        }
        canon(&Expr::sum(terms))
    })
}

fn value(theta: &TensorField, args: &[usize], beta: usize) -> Expr {
    let mut idx = args.to_vec();
    idx.push(beta);
    theta.get(&idx).clone()
}

/// `(omega ^ D theta)(X_0..X_k) = sum (-1)^i (D_{X_i} theta)(..^i..)`.
pub fn wedge_tautological(d_theta: &TensorField, k: usize) -> TensorField {
    let r = d_theta.dims()[d_theta.order() - 1];
    let m = d_theta.dims()[k];
    let mut slots = vec![Slot::LOW_G; k + 1];
    slots.push(d_theta.slots()[k]);
    let mut dims = vec![r; k + 1];
    dims.push(m);
    TensorField::from_fn(slots, dims, |idx| {
        let (xs, beta) = (&idx[..=k], idx[k + 1]);
        let terms = (0..=k).map(|i| {
            let mut j: Vec<usize> = xs.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &a)| a).collect();
            j.push(beta);
            j.push(xs[i]);
            let e = d_theta.get(&j).clone();
            if i % 2 == 0 {
                e
            } else {
                -e
            }
        });
        canon(&Expr::sum(terms))
    })
}

/// `theta^{T}(X_0..X_k) = sum_{i<j} (-1)^{i+j+1} theta(T(X_i,X_j), ..^i..^j..)`, zero for `k = 0`.
pub fn theta_torsion(theta: &TensorField, torsion: &TensorField, k: usize) -> TensorField {
    let r = torsion.dims()[0];
    let m = theta.dims()[k];
    let mut slots = vec![Slot::LOW_G; k + 1];
    slots.push(theta.slots()[k]);
    let mut dims = vec![r; k + 1];
    dims.push(m);
    TensorField::from_fn(slots, dims, |idx| {
        if k == 0 {
            return Expr::zero();
        }
        let (xs, beta) = (&idx[..=k], idx[k + 1]);
        let mut terms = Vec::new();
        for i in 0..=k {
            for j in (i + 1)..=k {
                let rest: Vec<usize> =
                    xs.iter().enumerate().filter(|&(p, _)| p != i && p != j).map(|(_, &a)| a).collect();
                for c in 0..r {
                    let t = torsion.get(&[xs[i], xs[j], c]);
                    if t.is_literal_zero() {
                        continue;
                    }
                    let mut args = vec![c];
                    args.extend_from_slice(&rest);
                    let e = t * &value(theta, &args, beta);
                    terms.push(if (i + j) % 2 == 1 { e } else { -e });
                }
            }
        }
        canon(&Expr::sum(terms))
    })
}

/// `d theta - omega ^ D theta - theta^{d omega}`, with `d omega` the torsion of `on_g`.
pub fn d_theta_defect(g: &Algebroid, on_g: &GConnection, on_e: &GConnection, theta: &TensorField) -> Result<TensorField> {
    let k = form_degree(g, on_e, theta)?;
    let d = exterior_derivative(g, on_e, theta)?;
    let dt = fundamental_operator(g, on_g, on_e, theta)?;
    let w = wedge_tautological(&dt, k);
    let t = crate::connections::torsion_g(g, on_g)?;
    let tt = theta_torsion(theta, &t, k);
    d.sub(&w)?.sub(&tt)
}

/// `D omega = 0` and `d omega = T nbar` for the tautological form.
pub fn tautological_checks(g: &Algebroid, nbar: &GConnection) -> Result<Verdict> {
    let omega = tautological_form(g);
    let d_omega = fundamental_operator(g, nbar, nbar, &omega)?.all_zero("d_omega_fundamental", g.chart());
    let ext = exterior_derivative(g, nbar, &omega)?;
    let t = crate::connections::torsion_g(g, nbar)?;
    let diff = ext.sub(&t)?;
    let ext_check = diff.all_zero("d_omega_torsion", g.chart());
    Ok(Verdict::all("tautological", vec![d_omega, ext_check]))
}
