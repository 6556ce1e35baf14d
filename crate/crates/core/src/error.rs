use std::fmt;
use std::path::PathBuf;

use crate::data::ClassLabel;

/// Logical RBM unit, used when reporting embedding failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalUnit {
    Visible(usize),
    Hidden(usize),
}

impl fmt::Display for LogicalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicalUnit::Visible(i) => write!(f, "visible unit {i}"),
            LogicalUnit::Hidden(j) => write!(f, "hidden unit {j}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("exact enumeration over {units} units exceeds the limit of {limit}")]
    Capacity { units: usize, limit: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("training diverged: non-finite {0}")]
    Divergence(&'static str),

    #[error("training step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("value {value} at position {index} is not a valid {domain} state")]
    Domain {
        domain: &'static str,
        index: usize,
        value: i64,
    },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: expected {expected} columns, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("{unit}: {reason}")]
    Embedding { unit: LogicalUnit, reason: String },

    #[error("requested {requested} {class} records but only {available} are available")]
    Insufficient {
        class: ClassLabel,
        requested: usize,
        available: usize,
    },

    #[error("no {0} records present")]
    EmptyClass(ClassLabel),

    #[error("remote annealer: {0}")]
    Remote(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed or unusable input data.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Ragged { .. }
                | Error::ModelFormat(_)
                | Error::Insufficient { .. }
                | Error::EmptyClass(_)
                | Error::Domain { .. }
                | Error::Empty(_)
        )
    }

    /// True when training produced non-finite parameters or gradients.
    pub fn is_divergence(&self) -> bool {
        match self {
            Error::Divergence(_) => true,
            Error::Step { source, .. } => source.is_divergence(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { what, expected, found })
    }
}
