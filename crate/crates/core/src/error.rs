use thiserror::Error;

/// Errors produced by diagram construction, evaluation, and the domain front end.
#[derive(Error, Debug)]
pub enum FoddError {
    #[error("leaf value must be a finite non-negative number, got {0}")]
    InvalidLeaf(f64),
    #[error("label order violation: {0}")]
    OrderViolation(String),
    #[error("predicate {pred} expects {expected} arguments, got {got}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown predicate '{0}'")]
    UnknownPredicate(String),
    #[error("unbound {kind} '{name}'")]
    Unbound { kind: &'static str, name: String },
    #[error("too many paths to target (cap {0})")]
    TooManyPaths(usize),
    #[error("valuation space of {0} exceeds the configured cap {1}")]
    TooManyValuations(f64, f64),
    #[error("ground atom count {0} exceeds the configured cap {1}")]
    TooManyAtoms(usize, usize),
    #[error("interpretation has an empty domain")]
    EmptyDomain,
    #[error("scalar combination would produce a negative leaf {0}")]
    NegativeResult(f64),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("model validation failed:\n{0}")]
    Validation(String),
    #[error("action dynamics left the consistent state space: {0}")]
    InconsistentDynamics(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, FoddError>;
