use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("families live on different universes ({left} vs {right})")]
    UniverseMismatch { left: usize, right: usize },

    #[error("element {element} is outside the universe [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("intersection size {lambda} exceeds universe size {n}")]
    InvalidLambda { lambda: usize, n: usize },

    #[error("{what} needs {needed} but the budget allows {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("the families have no disjoint pair")]
    NoDisjointPairs,

    #[error("edge density {density} is below the requested {epsilon}")]
    DensityTooLow { density: f64, epsilon: f64 },

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("the family is empty")]
    EmptyFamily,

    #[error("{0} is not prime")]
    InvalidPrime(u64),

    #[error("frequency {j} is zero modulo {p}")]
    InvalidFrequency { j: u64, p: u64 },

    #[error("the matrix is constant, so its variance is zero")]
    ZeroVariance,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("configured constants falsified: {0}")]
    ConstantsFalsified(String),

    #[error("{nnz} non-zero entries exceed the sparse limit {limit}")]
    TooDense { nnz: usize, limit: f64 },

    #[error("induced matching of size {matching} exceeds rank {rank}")]
    RankContradiction { matching: usize, rank: usize },

    #[error("progress violation: {0}")]
    ProgressViolation(String),

    #[error("no result: {0}")]
    EmptyResult(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
