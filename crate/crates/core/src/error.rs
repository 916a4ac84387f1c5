use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric contract violated: {0}")]
    NumericContract(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("unsupported rank {rank} (at most {max} supported)")]
    UnsupportedRank { rank: usize, max: usize },

    #[error("support outside the GHZ block: weight {0:e}")]
    InvalidSupport(f64),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("local operator for party {party} is singular (|det| = {det:e}); state leaves the GHZ class")]
    ClassExit { party: usize, det: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParameter(String),

    #[error("degenerate inversion branch: 3-tangle {0:e} too small")]
    DegenerateBranch(f64),

    #[error("inconsistent tangles: radicand {0:e}")]
    InconsistentTangles(f64),

    #[error("incompatible marginals: radicand {0:e}")]
    IncompatibleMarginals(f64),

    #[error("numeric failure: {reason} (best residual {residual:e})")]
    NumericFailure { reason: String, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
