//! Chart-level calculus for Lie algebroids and Cartan connections.
//!
//! Every object lives on a single coordinate chart with trivialized bundles, so
//! sections are component vectors of symbolic expressions and every identity
//! reduces to a zero test on a finite list of expressions.

pub mod algebroid;
pub mod bundles;
pub mod cartan;
pub mod connections;
pub mod error;
pub mod jet;
pub mod random;
pub mod symcore;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{Status, Verdict, Witness, ZeroCheck};
