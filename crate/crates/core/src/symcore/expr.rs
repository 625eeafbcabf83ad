use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational constant.
pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A chart coordinate. Ordering and equality use the position in the chart.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub index: usize,
    pub name: Arc<str>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(Rational),
    Var(Var),
    Neg(Expr),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Expr, Expr),
    Pow(Expr, i64),
    Func(Func, Expr),
}

/// Immutable symbolic scalar expression over chart coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::from_node(Node::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::constant(rational(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(index: usize, name: &str) -> Expr {
        Expr::from_node(Node::Var(Var { index, name: Arc::from(name) }))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Expr::func(Func::Sqrt, self.clone())
    }

    /// Integer power with light folding.
    pub fn pow(&self, k: i64) -> Expr {
        match (self.node(), k) {
            (_, 0) => Expr::one(),
            (_, 1) => self.clone(),
            (Node::Const(c), k) if k > 0 => Expr::constant(num_traits::pow(c.clone(), k as usize)),
            (Node::Const(c), k) if !c.is_zero() => {
                Expr::constant(num_traits::pow(c.recip(), (-k) as usize))
            }
            _ => Expr::from_node(Node::Pow(self.clone(), k)),
        }
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Literal zero constant (no canonicalization).
    pub fn is_literal_zero(&self) -> bool {
        matches!(self.node(), Node::Const(c) if c.is_zero())
    }

    pub fn is_literal_one(&self) -> bool {
        matches!(self.node(), Node::Const(c) if c.is_one())
    }

    /// Sum of a list of expressions with light folding.
    pub fn sum<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut terms = Vec::new();
        let mut constant = Rational::zero();
        for e in items {
            match e.node() {
                Node::Const(c) => constant += c,
                Node::Add(inner) => {
                    for t in inner {
                        match t.node() {
                            Node::Const(c) => constant += c,
                            _ => terms.push(t.clone()),
                        }
                    }
                }
                _ => terms.push(e),
            }
        }
        if !constant.is_zero() {
            terms.push(Expr::constant(constant));
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::from_node(Node::Add(terms)),
        }
    }

    /// Product of a list of expressions with light folding.
    pub fn product<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut factors = Vec::new();
        let mut constant = Rational::one();
        for e in items {
            match e.node() {
                Node::Const(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    constant *= c;
                }
                Node::Mul(inner) => {
                    for t in inner {
                        match t.node() {
                            Node::Const(c) => constant *= c,
                            _ => factors.push(t.clone()),
                        }
                    }
                }
                _ => factors.push(e),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if !constant.is_one() {
            factors.insert(0, Expr::constant(constant));
        }
        match factors.len() {
            0 => Expr::one(),
            1 => factors.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(factors)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Neg(e) | Node::Pow(e, _) | Node::Func(_, e) => e.size(),
            Node::Add(v) | Node::Mul(v) => v.iter().map(Expr::size).sum(),
            Node::Div(a, b) => a.size() + b.size(),
        }
    }

    /// Largest coordinate index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) => None,
            Node::Var(v) => Some(v.index),
            Node::Neg(e) | Node::Pow(e, _) | Node::Func(_, e) => e.max_var(),
            Node::Add(v) | Node::Mul(v) => v.iter().filter_map(Expr::max_var).max(),
            Node::Div(a, b) => a.max_var().max(b.max_var()),
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Expr {
        Expr::constant(c)
    }
}

fn add(a: &Expr, b: &Expr) -> Expr {
    if a.is_literal_zero() {
        return b.clone();
    }
    if b.is_literal_zero() {
        return a.clone();
    }
    Expr::sum([a.clone(), b.clone()])
}

fn mul(a: &Expr, b: &Expr) -> Expr {
    if a.is_literal_one() {
        return b.clone();
    }
    if b.is_literal_one() {
        return a.clone();
    }
    Expr::product([a.clone(), b.clone()])
}

fn neg(a: &Expr) -> Expr {
    match a.node() {
        Node::Const(c) => Expr::constant(-c.clone()),
        Node::Neg(inner) => inner.clone(),
        _ => Expr::from_node(Node::Neg(a.clone())),
    }
}

fn div(a: &Expr, b: &Expr) -> Expr {
    if b.is_literal_one() {
        return a.clone();
    }
    match (a.node(), b.node()) {
        (Node::Const(x), Node::Const(y)) if !y.is_zero() => Expr::constant(x / y),
        (Node::Const(x), _) if x.is_zero() => Expr::zero(),
        _ => Expr::from_node(Node::Div(a.clone(), b.clone())),
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $f:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(&self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(&self, rhs)
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(self, rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Mul, mul, mul);
binop!(Div, div, div);
binop!(Sub, sub, |a: &Expr, b: &Expr| add(a, &neg(b)));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(&self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self)
    }
}

impl ops::AddAssign<Expr> for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        *self = add(self, &rhs);
    }
}

impl ops::AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        *self = add(self, rhs);
    }
}

impl ops::SubAssign<Expr> for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        *self = add(self, &neg(&rhs));
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter)
    }
}

// Printing. The output is accepted by the parser and re-parses to the same
// tree for every tree the parser produces.

fn prec(node: &Node) -> u8 {
    match node {
        Node::Add(_) => 1,
        Node::Neg(_) => 2,
        Node::Mul(_) | Node::Div(..) => 3,
        Node::Pow(..) => 4,
        Node::Const(c) if c.is_negative() => 2,
        Node::Const(c) if !c.is_integer() && !is_terminating(c) => 3,
        _ => 5,
    }
}

fn is_terminating(c: &Rational) -> bool {
    let mut d = c.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    while (&d % &five).is_zero() {
        d /= &five;
    }
    d.is_one()
}

fn write_const(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_negative() {
        f.write_str("-")?;
        return write_const(f, &-c.clone());
    }
    if c.is_integer() {
        return write!(f, "{}", c.numer());
    }
    if is_terminating(c) {
        // exact decimal expansion
        let mut num = c.numer().clone();
        let den = c.denom().clone();
        let int_part = &num / &den;
        num = &num % &den;
        write!(f, "{}.", int_part)?;
        let ten = BigInt::from(10);
        while !num.is_zero() {
            num *= &ten;
            write!(f, "{}", &num / &den)?;
            num = &num % &den;
        }
        return Ok(());
    }
    write!(f, "{}/{}", c.numer(), c.denom())
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_const(f, c),
            Node::Var(v) => f.write_str(&v.name),
            Node::Func(func, arg) => write!(f, "{}({})", func.name(), arg),
            Node::Neg(inner) => {
                f.write_str("-")?;
                write_child(f, inner, prec(inner.node()) < 4)
            }
            Node::Add(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    match t.node() {
                        Node::Neg(inner) if k > 0 => {
                            f.write_str(" - ")?;
                            write_child(f, inner, prec(inner.node()) <= 2)?;
                        }
                        _ => {
                            if k > 0 {
                                f.write_str(" + ")?;
                            }
                            write_child(f, t, prec(t.node()) <= 1 || (k > 0 && prec(t.node()) == 2))?;
                        }
                    }
                }
                Ok(())
            }
            Node::Mul(factors) => {
                for (k, t) in factors.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    let p = prec(t.node());
                    let paren = match t.node() {
                        Node::Mul(_) | Node::Add(_) => true,
                        Node::Div(..) => k > 0,
                        _ => p == 3 && k > 0 || p < 2,
                    };
                    // a leading negation would capture the whole product on re-parse
                    let paren = paren || (k == 0 && p == 2 && !matches!(t.node(), Node::Neg(_)));
                    write_child(f, t, paren)?;
                }
                Ok(())
            }
            Node::Div(a, b) => {
                let pa = prec(a.node());
                write_child(f, a, pa <= 1 || (pa == 2 && !matches!(a.node(), Node::Neg(_))))?;
                f.write_str("/")?;
                let pb = prec(b.node());
                write_child(f, b, pb <= 3 && !matches!(b.node(), Node::Neg(_)))
            }
            Node::Pow(base, k) => {
                write_child(f, base, prec(base.node()) < 5)?;
                write!(f, "^{}", k)
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}
