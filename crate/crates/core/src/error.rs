//! Error type shared across the crate.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A plane failed validation (non-unit or non-finite normal).
    #[error("invalid plane: {0}")]
    InvalidPlane(String),

    /// Inputs violated an operation precondition (empty cloud, size
    /// mismatch, non-finite coordinate, bad parameter).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed file content; `offset` is the byte position of the
    /// offending construct.
    #[error("parse error in {path} at byte {offset}: {message}")]
    Parse {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    /// Syntactically valid file whose values violate a contract
    /// (non-finite coordinates, zero points).
    #[error("validation error in {path}: {message}")]
    Validation { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Exact assignment solve refused; callers should switch to the
    /// approximate transport solver.
    #[error("point sets of {size} points exceed the exact solver cap of {cap}; use emd_approx")]
    TooLarge { size: usize, cap: usize },

    /// Iterative solver stopped before reaching its target.
    #[error("transport solver did not converge: marginal gap {gap:.3e} after {iterations} iterations")]
    Convergence { gap: f64, iterations: usize },

    /// External feature binding lacks an entry for a shape.
    #[error("no feature vector bound for shape id `{id}`")]
    MissingFeature { id: String },

    /// Pooled standard deviation collapsed to zero.
    #[error("degenerate normalization: pooled standard deviation is zero")]
    DegenerateScale,

    /// Manifest carries no normalization statistics.
    #[error("manifest has no normalization statistics; derive them with the stats command first")]
    MissingStats,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn validation(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
