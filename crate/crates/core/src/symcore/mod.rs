//! Minimal computer algebra over chart coordinates.

mod canon;
mod chart;
mod diff;
mod eval;
mod expr;
pub mod matrix;
mod parse;
mod zero;

pub use canon::{canon, terms};
pub use chart::{Chart, Sampling};
pub use diff::differentiate;
pub use eval::eval;
pub use expr::{integer, rational, Expr, Func, Node, Rational, Var};
pub use parse::{parse_expr, parse_rational};
pub use zero::{is_zero, DecisionPath, ZeroTest};
