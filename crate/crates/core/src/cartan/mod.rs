//! Cartan connections on Lie algebroids: the compatibility test, the
//! classification theorems and the worked pipelines built on them.

mod compat;
mod duality;
mod holonomy;
mod invariant;
mod parallelism;
mod poisson;
mod reductive;
mod riemann;

pub use compat::*;
pub use duality::*;
pub use holonomy::*;
pub use invariant::*;
pub use parallelism::*;
pub use poisson::*;
pub use reductive::*;
pub use riemann::*;
