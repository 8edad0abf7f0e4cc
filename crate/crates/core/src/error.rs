use thiserror::Error;

use crate::relational::TupleId;

/// Errors raised anywhere in the evolution / inversion pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("instances are incomparable: {0}")]
    Incomparable(String),

    #[error("duplicate tuple id {0} in relation {1}")]
    DuplicateTupleId(TupleId, String),

    #[error("malformed tuple id {0:?}")]
    MalformedTupleId(String),

    #[error("invalid dependency: {0}")]
    InvalidDependency(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unregistered function {0}")]
    UnregisteredFunction(String),

    #[error("function {name} expects {expected} arguments, got {got}")]
    FunctionArity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("function {0} applied to a labeled null")]
    NonGroundFunctionInput(String),

    #[error("function {name} is not applicable: {reason}")]
    FunctionDomain { name: String, reason: String },

    #[error("insufficient provenance: {0}")]
    InsufficientProvenance(String),

    #[error("invalid schema modification operator: {0}")]
    InvalidSmo(String),

    #[error("evolution step {step} ({kind}): {message}")]
    Step {
        step: usize,
        kind: String,
        message: String,
    },

    #[error("json: {0}")]
    Json(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
