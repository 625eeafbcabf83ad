use thiserror::Error;

use crate::verdict::Witness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("domain violation ({kind}) in `{expr}`")]
    Domain { kind: DomainKind, expr: String },

    #[error("zero test undecidable on box: every sample point hits a domain violation in `{expr}`")]
    Undecidable { expr: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid chart: {0}")]
    Chart(String),

    #[error("not an infinitesimal action: [V_{a}, V_{b}] defect at {witness}")]
    NotAction { a: usize, b: usize, witness: Witness },

    #[error("structure constants are not a Lie algebra: {0}")]
    NotLieAlgebra(String),

    #[error("bivector is not Poisson: Jacobi defect for ({i},{j},{k}) at {witness}")]
    NotPoisson { i: usize, j: usize, k: usize, witness: Witness },

    #[error("bivector is not antisymmetric at {0}")]
    NotAntisymmetric(Witness),

    #[error("frame is not integrable, brackets do not close: {witness}")]
    NotIntegrable { witness: Witness },

    #[error("frame degenerate at point {point:?}")]
    DegenerateFrame { point: Vec<f64> },

    #[error("anchor incompatibility: {0}")]
    AnchorIncompatible(Witness),

    #[error("target mismatch: {0}")]
    TargetMismatch(String),

    #[error("g-connection is not flat (not a representation): {0}")]
    NotFlat(Witness),

    #[error("map is not a splitting of the anchor: {0}")]
    NotSplitting(Witness),

    #[error("metric degenerate or not symmetric: {0}")]
    DegenerateMetric(Witness),

    #[error("endomorphism field {index} is not skew for the metric: {witness}")]
    NotSkew { index: usize, witness: Witness },

    #[error("parallelism singular at point {point:?}")]
    SingularParallelism { point: Vec<f64> },

    #[error("algebroid is not transitive at point {point:?} (orbit rank {rank})")]
    Intransitive { point: Vec<f64>, rank: usize },

    #[error("holonomy loop leaves the sample box")]
    LoopOutsideBox,

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("form degree {0} not supported (k <= 2)")]
    Degree(usize),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogNonPositive,
    SqrtNegative,
    NonFinite,
}

impl std::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogNonPositive => "log of non-positive value",
            DomainKind::SqrtNegative => "sqrt of negative value",
            DomainKind::NonFinite => "non-finite value",
        };
        f.write_str(s)
    }
}
