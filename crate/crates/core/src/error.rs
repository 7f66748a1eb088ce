use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground-set sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("index {index} out of range for ground set [{n}]")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("transposition endpoints must be distinct")]
    DegenerateTransposition,

    #[error("not a partition of [{n}]: {reason}")]
    NotAPartition { n: usize, reason: String },

    #[error("partition has crossing blocks (witness {a} < {b} < {c} < {d})")]
    Crossing { a: usize, b: usize, c: usize, d: usize },

    #[error("factor sequence is not a minimal factorization of the {n}-cycle")]
    NotMinimal { n: usize },

    #[error("walk code rejected: {0}")]
    InvalidCode(String),

    #[error("bridge condition violated: increments sum to {sum}, expected -1")]
    NotABridge { sum: i64 },

    #[error("path is not an excursion: {0}")]
    NotAnExcursion(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("infeasible conditioning: {0}")]
    Infeasible(String),

    #[error("rejection budget of {attempts} attempts exhausted")]
    RejectionBudget { attempts: usize },

    #[error("{what} limited to {max}, got {got}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
    },
}
