use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single broken database rule, tied to the entry (or table) it was found on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.rule)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unmapped character {ch:?} at offset {offset}")]
    Unmapped { ch: char, offset: usize },

    #[error("transliteration table line {line}: {msg}")]
    Table { line: usize, msg: String },

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("database validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty input")]
    EmptyInput,

    #[error("model is not trained")]
    UntrainedModel,

    #[error("dialect {0} is not loaded")]
    DialectNotLoaded(String),

    #[error("unknown view {0:?}")]
    UnknownView(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Wraps a serde_json failure on a document read from disk so the caller
    /// sees the line and column of the problem.
    pub(crate) fn parse(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            msg: err.to_string(),
        }
    }
}
