//! Small dense matrices of expressions (row-major `Vec<Vec<Expr>>`).

use super::canon::canon;
use super::expr::Expr;
use crate::error::{Error, Result};

pub type ExprMatrix = Vec<Vec<Expr>>;

pub fn zeros(rows: usize, cols: usize) -> ExprMatrix {
    vec![vec![Expr::zero(); cols]; rows]
}

pub fn identity(n: usize) -> ExprMatrix {
    (0..n).map(|i| (0..n).map(|j| Expr::int((i == j) as i64)).collect()).collect()
}

pub fn transpose(m: &ExprMatrix) -> ExprMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn matmul(a: &ExprMatrix, b: &ExprMatrix) -> ExprMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..cols).map(|j| canon(&(0..inner).map(|k| &row[k] * &b[k][j]).sum())).collect())
        .collect()
}

/// Determinant by cofactor expansion; meant for the small sizes that occur here.
pub fn det(m: &ExprMatrix) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => canon(&(&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0])),
        _ => {
            let mut acc = Vec::with_capacity(n);
            for j in 0..n {
                if m[0][j].is_literal_zero() {
                    continue;
                }
                let c = &m[0][j] * det(&minor(m, 0, j));
                acc.push(if j % 2 == 0 { c } else { -c });
            }
            canon(&Expr::sum(acc))
        }
    }
}

fn minor(m: &ExprMatrix, row: usize, col: usize) -> ExprMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Inverse by the adjugate formula. Fails when the determinant is symbolically zero.
pub fn inverse(m: &ExprMatrix) -> Result<ExprMatrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let d = det(m);
    if d.is_literal_zero() {
        return Err(Error::Shape("matrix is singular".into()));
    }
    let inv_d = canon(&d.pow(-1));
    if n == 1 {
        return Ok(vec![vec![inv_d]]);
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let cof = det(&minor(m, j, i));
                    let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                    canon(&(signed * &inv_d))
                })
                .collect()
        })
        .collect())
}

/// Apply a matrix to a column vector.
pub fn apply(m: &ExprMatrix, v: &[Expr]) -> Vec<Expr> {
    m.iter().map(|row| canon(&row.iter().zip(v).map(|(a, b)| a * b).sum())).collect()
}
