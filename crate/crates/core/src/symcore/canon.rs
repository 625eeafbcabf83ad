//! Canonical form: a sorted sum of rational multiples of monomials.
//!
//! A monomial is a product of atoms raised to nonzero integer powers. Atoms are
//! coordinates, function applications with canonical arguments, and (only with
//! negative exponents) multi-term sums normalized to leading coefficient one.
//! Products distribute over sums; division is never turned into a rational
//! normal form.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::{Expr, Func, Node, Rational};

type Mono = BTreeMap<Expr, i64>;

#[derive(Clone, Debug, Default, PartialEq)]
struct Poly {
    terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    fn constant(c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::new(), c);
        }
        Poly { terms }
    }

    fn atom(atom: Expr, k: i64) -> Poly {
        let mut m = Mono::new();
        m.insert(atom, k);
        let mut terms = BTreeMap::new();
        terms.insert(m, Rational::one());
        Poly { terms }
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
        self
    }

    fn scale(mut self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::default();
        }
        for c in self.terms.values_mut() {
            *c *= s;
        }
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    fn single(&self) -> Option<(&Mono, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn pow(&self, k: i64) -> Poly {
        if k == 0 {
            return Poly::constant(Rational::one());
        }
        if self.terms.is_empty() {
            if k > 0 {
                return Poly::default();
            }
            return Poly::atom(Expr::zero(), k);
        }
        if let Some((m, c)) = self.single() {
            let c = if k > 0 { num_traits::pow(c.clone(), k as usize) } else { num_traits::pow(c.recip(), (-k) as usize) };
            let m: Mono = m.iter().map(|(a, e)| (a.clone(), e * k)).collect();
            let mut terms = BTreeMap::new();
            terms.insert(m, c);
            return Poly { terms };
        }
        if k > 0 {
            let mut acc = self.clone();
            for _ in 1..k {
                acc = acc.mul(self);
            }
            return acc;
        }
        // multi-term sum with negative exponent stays an opaque atom
        let lead = self.terms.values().next().unwrap().clone();
        let normalized = self.clone().scale(&lead.recip());
        let atom = normalized.to_expr();
        let coef = num_traits::pow(lead.recip(), (-k) as usize);
        Poly::atom(atom, k).scale(&coef)
    }

    fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut factors = Vec::with_capacity(m.len() + 1);
            if !c.is_one() || m.is_empty() {
                factors.push(Expr::constant(c.clone()));
            }
            for (atom, &k) in m {
                factors.push(if k == 1 { atom.clone() } else { Expr::from_node(Node::Pow(atom.clone(), k)) });
            }
            terms.push(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::from_node(Node::Mul(factors)) });
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::from_node(Node::Add(terms)),
        }
    }
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = a.clone();
    for (atom, &k) in b {
        let e = out.entry(atom.clone()).or_insert(0);
        *e += k;
        if *e == 0 {
            out.remove(atom);
        }
    }
    out
}

fn exact_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    if &(&n * &n) == c.numer() && &(&d * &d) == c.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn fold_func(f: Func, arg: &Expr) -> Option<Rational> {
    let c = arg.as_const()?;
    match f {
        Func::Sin | Func::Tan if c.is_zero() => Some(Rational::zero()),
        Func::Cos | Func::Exp if c.is_zero() => Some(Rational::one()),
        Func::Log if c.is_one() => Some(Rational::zero()),
        Func::Sqrt => exact_sqrt(c),
        _ => None,
    }
}

fn poly_of(e: &Expr) -> Poly {
    match e.node() {
        Node::Const(c) => Poly::constant(c.clone()),
        Node::Var(_) => Poly::atom(e.clone(), 1),
        Node::Neg(a) => poly_of(a).scale(&-Rational::one()),
        Node::Add(items) => items.iter().fold(Poly::default(), |acc, t| acc.add(poly_of(t))),
        Node::Mul(items) => {
            let mut acc = Poly::constant(Rational::one());
            for t in items {
                if acc.terms.is_empty() {
                    break;
                }
                acc = acc.mul(&poly_of(t));
            }
            acc
        }
        Node::Div(a, b) => poly_of(a).mul(&poly_of(b).pow(-1)),
        Node::Pow(b, k) => poly_of(b).pow(*k),
        Node::Func(f, arg) => {
            let arg = canon(arg);
            match fold_func(*f, &arg) {
                Some(c) => Poly::constant(c),
                None => Poly::atom(Expr::func(*f, arg), 1),
            }
        }
    }
}

/// Canonical form of `e`. Idempotent, and equal canonical trees denote equal functions.
pub fn canon(e: &Expr) -> Expr {
    poly_of(e).to_expr()
}

/// The additive terms of a canonical expression.
pub fn terms(canonical: &Expr) -> Vec<Expr> {
    match canonical.node() {
        Node::Add(items) => items.clone(),
        _ => vec![canonical.clone()],
    }
}

impl Expr {
    pub fn canon(&self) -> Expr {
        canon(self)
    }

    /// True when the canonical form is the literal zero.
    pub fn is_symbolic_zero(&self) -> bool {
        poly_of(self).terms.is_empty()
    }

    /// Canonical numeric constant value, if the expression reduces to one.
    pub fn constant_value(&self) -> Option<Rational> {
        let p = poly_of(self);
        if p.terms.is_empty() {
            return Some(Rational::zero());
        }
        p.single().filter(|(m, _)| m.is_empty()).map(|(_, c)| c.clone())
    }
}
