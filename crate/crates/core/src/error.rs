use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("need at least {required} agents, got {got}")]
    TooFewAgents { required: usize, got: usize },

    #[error("no candidates left to choose from for agent {chooser}")]
    EmptyCandidates { chooser: usize },

    #[error("sample of size {got} is too small (need at least {required})")]
    SampleTooSmall { required: usize, got: usize },

    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("solver did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64 },

    #[error("config error{}: `{key}`: {message}", describe_line(key, *.line))]
    Config {
        key: String,
        /// 1-based line in the config file, or `None` when the key is not in the file.
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn describe_line(key: &str, line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" (line {l})"),
        // Command-line flags have no position in the file.
        None if key.starts_with("--") => String::new(),
        None => " (not set in file)".to_string(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
