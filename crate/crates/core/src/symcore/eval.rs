use num_traits::ToPrimitive;

use super::expr::{Expr, Func, Node};
use crate::error::{DomainKind, Error, Result};

/// IEEE-double value of `e` at `point`. Domain violations name the offending subexpression.
pub fn eval(e: &Expr, point: &[f64]) -> Result<f64> {
    let v = match e.node() {
        Node::Const(c) => c.to_f64().unwrap_or(f64::NAN),
        Node::Var(v) => *point
            .get(v.index)
            .ok_or_else(|| Error::Shape(format!("point has {} coordinates, `{}` needs more", point.len(), v.name)))?,
        Node::Neg(a) => -eval(a, point)?,
        Node::Add(terms) => {
            let mut s = 0.0;
            for t in terms {
                s += eval(t, point)?;
            }
            s
        }
        Node::Mul(factors) => {
            let mut p = 1.0;
            for t in factors {
                p *= eval(t, point)?;
            }
            p
        }
        Node::Div(a, b) => {
            let den = eval(b, point)?;
            if den == 0.0 {
                return Err(domain(DomainKind::DivisionByZero, e));
            }
            eval(a, point)? / den
        }
        Node::Pow(b, k) => {
            let base = eval(b, point)?;
            if *k < 0 && base == 0.0 {
                return Err(domain(DomainKind::DivisionByZero, e));
            }
            base.powi(*k as i32)
        }
        Node::Func(f, a) => {
            let x = eval(a, point)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.cos() == 0.0 {
                        return Err(domain(DomainKind::DivisionByZero, e));
                    }
                    x.tan()
                }
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(domain(DomainKind::LogNonPositive, e));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(domain(DomainKind::SqrtNegative, e));
                    }
                    x.sqrt()
                }
            }
        }
    };
    if !v.is_finite() {
        return Err(domain(DomainKind::NonFinite, e));
    }
    Ok(v)
}

fn domain(kind: DomainKind, e: &Expr) -> Error {
    Error::Domain { kind, expr: super::zero::truncate(&e.to_string()) }
}
