use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error classes, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Degenerate,
    Convergence,
    Io,
    Internal,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Degenerate => 3,
            ErrorCategory::Convergence => 4,
            ErrorCategory::Io => 5,
            ErrorCategory::Internal => 70,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("latitude {lat} out of range [-90, 90]{}", context_suffix(.context))]
    LatitudeOutOfRange { lat: f64, context: Option<String> },

    #[error("non-finite coordinate{}", context_suffix(.context))]
    NonFinite { context: Option<String> },

    #[error("degenerate configuration in set `{set}`: {reason}")]
    DegenerateSet { set: String, reason: String },

    #[error("degenerate curve `{curve}`: {reason}")]
    DegenerateCurve { curve: String, reason: String },

    #[error("region `{region}` encloses no grid node")]
    EmptyRegion { region: String },

    #[error("region `{region}` reaches the domain boundary at node ({i}, {j})")]
    DomainViolation { region: String, i: usize, j: usize },

    #[error("node ({i}, {j}) claimed by regions `{first}` and `{second}` with different values")]
    RegionConflict {
        i: usize,
        j: usize,
        first: String,
        second: String,
    },

    #[error("polygon of region `{region}` is not simple: edges {e1} and {e2} intersect")]
    NonSimplePolygon { region: String, e1: usize, e2: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("solver residual {achieved:e} exceeds tolerance {tolerance:e}")]
    Convergence { achieved: f64, tolerance: f64 },

    #[error("point ({x1}, {x2}) lies outside the field domain{}", context_suffix(.context))]
    OutOfDomain {
        x1: f64,
        x2: f64,
        context: Option<String>,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}:{line}: {message}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report self-check failed: {0}")]
    Consistency(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

fn context_suffix(context: &Option<String>) -> String {
    match context {
        Some(c) => format!(" ({c})"),
        None => String::new(),
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::LatitudeOutOfRange { .. }
            | Error::NonFinite { .. }
            | Error::DegenerateSet { .. }
            | Error::DegenerateCurve { .. }
            | Error::EmptyRegion { .. }
            | Error::NonSimplePolygon { .. }
            | Error::Singular(_) => ErrorCategory::Degenerate,
            Error::DomainViolation { .. }
            | Error::RegionConflict { .. }
            | Error::InvalidGrid(_)
            | Error::OutOfDomain { .. }
            | Error::Argument(_)
            | Error::Config(_)
            | Error::Parse { .. } => ErrorCategory::Config,
            Error::Convergence { .. } => ErrorCategory::Convergence,
            Error::Io { .. } => ErrorCategory::Io,
            Error::Consistency(_) => ErrorCategory::Internal,
            Error::Context { source, .. } => source.category(),
        }
    }

    /// Wraps the error with a description of what was being processed.
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Strips any [`Error::Context`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
