use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Harness misconfiguration: bad flags, missing bundled files, absent references.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown problem id `{0}`; valid ids: {ids}", ids = crate::ProblemId::valid_ids())]
    UnknownProblem(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("missing problem description document at {0}")]
    MissingDescription(PathBuf),
    #[error("missing reference cost for instance `{0}`")]
    MissingReference(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl ConfigError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        ConfigError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Malformed instance or solution text.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
        }
    }

    pub fn at_line(line: usize, message: impl std::fmt::Display) -> Self {
        ParseError::new(format!("line {line}: {message}"))
    }
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError::new(format!("invalid JSON: {e}"))
    }
}

/// A reference solver could not produce a feasible solution.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("solver failure: {0}")]
pub struct SolverError(pub String);
