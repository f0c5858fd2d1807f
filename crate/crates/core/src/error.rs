use thiserror::Error;

use crate::instance::ProblemClass;

/// Errors raised across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported problem class {0} for this operation")]
    UnsupportedClass(ProblemClass),

    #[error("problem class mismatch: expected {expected}, got {actual}")]
    ClassMismatch {
        expected: ProblemClass,
        actual: ProblemClass,
    },

    #[error("solution shape does not match instance: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown family `{family}` for class {class}")]
    UnknownFamily { class: ProblemClass, family: String },

    #[error("unknown solver `{0}`")]
    UnknownSolver(String),

    #[error("oracle budget exceeded after {states} states ({seconds:.3} s)")]
    BudgetExceeded { states: u64, seconds: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("certification failed for instance {instance}: {reason}")]
    Certification { instance: String, reason: String },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("formula is not Horn: clause {0} has more than one positive literal")]
    NotHorn(usize),

    #[error("no candidate was produced in any synthesis round")]
    NoCandidate,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
