use super::canon::canon;
use super::expr::{Expr, Func, Node};

/// Exact derivative with respect to coordinate `index`, in canonical form.
pub fn differentiate(e: &Expr, index: usize) -> Expr {
    canon(&d(e, index))
}

fn depends_on(e: &Expr, index: usize) -> bool {
    match e.node() {
        Node::Const(_) => false,
        Node::Var(v) => v.index == index,
        Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => depends_on(a, index),
        Node::Add(v) | Node::Mul(v) => v.iter().any(|t| depends_on(t, index)),
        Node::Div(a, b) => depends_on(a, index) || depends_on(b, index),
    }
}

fn d(e: &Expr, i: usize) -> Expr {
    if !depends_on(e, i) {
        return Expr::zero();
    }
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(v) => Expr::int(if v.index == i { 1 } else { 0 }),
        Node::Neg(a) => -d(a, i),
        Node::Add(terms) => Expr::sum(terms.iter().map(|t| d(t, i))),
        Node::Mul(factors) => {
            let mut out = Vec::new();
            for k in 0..factors.len() {
                let dk = d(&factors[k], i);
                if dk.is_literal_zero() {
                    continue;
                }
                let mut prod: Vec<Expr> = factors.clone();
                prod[k] = dk;
                out.push(Expr::product(prod));
            }
            Expr::sum(out)
        }
        Node::Div(a, b) => {
            // (a/b)' = a'/b - a b' / b^2
            let da = d(a, i);
            let db = d(b, i);
            da / b - a * db * b.pow(-2)
        }
        Node::Pow(b, k) => Expr::int(*k) * b.pow(*k - 1) * d(b, i),
        Node::Func(f, a) => {
            let inner = d(a, i);
            let outer = match f {
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
                Func::Tan => Expr::one() + Expr::func(Func::Tan, a.clone()).pow(2),
                Func::Exp => e.clone(),
                Func::Log => a.pow(-1),
                Func::Sqrt => Expr::ratio(1, 2) * e.pow(-1),
            };
            outer * inner
        }
    }
}
