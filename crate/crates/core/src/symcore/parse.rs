//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := unary (('*'|'/') unary)* ;
//! unary  := '-' unary | pow ;
//! pow    := atom ('^' signed-integer)? ;
//! atom   := number | ident | func '(' expr ')' | '(' expr ')' ;
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use super::chart::Chart;
use super::expr::{Expr, Func, Node, Var};
use crate::error::{Error, Result};

pub fn parse_expr(text: &str, chart: &Chart) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, chart };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    terms.push(Expr::from_node(Node::Neg(t)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::from_node(Node::Add(terms)) })
    }

    fn term(&mut self) -> Result<Expr> {
        fn fold(mut factors: Vec<Expr>) -> Expr {
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Expr::from_node(Node::Mul(factors))
            }
        }
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    factors.push(self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    let lhs = fold(std::mem::take(&mut factors));
                    factors.push(Expr::from_node(Node::Div(lhs, rhs)));
                }
                _ => break,
            }
        }
        Ok(fold(factors))
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::from_node(Node::Neg(inner)));
        }
        self.pow()
    }

    fn pow(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let negative = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("exponent must be an integer"));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: i64 = digits.parse().map_err(|_| self.err("exponent out of range"))?;
            if self.pos < self.src.len() && self.src[self.pos] == b'.' {
                return Err(self.err("exponent must be an integer"));
            }
            return Ok(Expr::from_node(Node::Pow(base, if negative { -k } else { k })));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(f) = Func::from_name(ident) {
                    if self.peek() == Some(b'(') {
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        return Ok(Expr::func(f, arg));
                    }
                }
                match self.chart.coord_index(ident) {
                    Some(index) => Ok(Expr::from_node(Node::Var(Var {
                        index,
                        name: self.chart.coord_names()[index].clone(),
                    }))),
                    None => Err(Error::UnknownIdentifier(ident.to_string())),
                }
            }
            Some(_) => Err(self.err("expected a number, identifier or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        let mut frac_digits = String::new();
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fstart = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if fstart == self.pos {
                return Err(self.err("expected digits after `.`"));
            }
            frac_digits = std::str::from_utf8(&self.src[fstart..self.pos]).unwrap().to_string();
        }
        let numer: BigInt = format!("{}{}", int_digits, frac_digits).parse().unwrap();
        let denom = num_traits::pow(BigInt::from(10), frac_digits.len());
        Ok(Expr::constant(BigRational::new(numer, denom)))
    }
}

/// Parse a rational literal such as `"3"`, `"-1.25"` or `"2/3"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t),
    };
    let parse_dec = |s: &str| -> Result<BigRational> {
        let s = s.trim();
        let bad = || Error::Syntax { pos: 0, msg: format!("not a rational literal: `{}`", text) };
        let (ip, fp) = match s.split_once('.') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        if ip.is_empty() || !ip.bytes().all(|b| b.is_ascii_digit()) || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let numer: BigInt = format!("{}{}", ip, fp).parse().map_err(|_| bad())?;
        Ok(BigRational::new(numer, num_traits::pow(BigInt::from(10), fp.len())))
    };
    let value = match body.split_once('/') {
        Some((n, d)) => {
            let d = parse_dec(d)?;
            if num_traits::Zero::is_zero(&d) {
                return Err(Error::Syntax { pos: 0, msg: "zero denominator".into() });
            }
            parse_dec(n)? / d
        }
        None => parse_dec(body)?,
    };
    Ok(if neg { -value } else { value })
}
