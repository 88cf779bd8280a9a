use thiserror::Error;

/// Error type shared by the simulation, theory and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An internal bookkeeping invariant was violated (e.g. decrementing a
    /// clique size with zero count).
    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    /// A numerical routine did not reach the requested tolerance within its
    /// budget. `worst_k` names the sequence entry that failed.
    #[error("failed to converge: {detail} (worst k = {worst_k})")]
    NonConvergence { worst_k: usize, detail: String },

    /// Malformed input text (snapshot files, checkpoint lists, tables).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the CLI: 1 validation, 2 numeric
    /// non-convergence, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Parse { .. } => 1,
            Error::NonConvergence { .. } | Error::InconsistentState(_) => 2,
            Error::Io(_) | Error::Json(_) => 3,
        }
    }
}
