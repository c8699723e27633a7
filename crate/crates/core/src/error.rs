use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
///
/// Everything except [`Error::Inconsistent`], [`Error::Io`] and [`Error::CacheFormat`] is a usage
/// error: the caller asked for something outside an operation's preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomials live in different rings: {left} vs {right} variables")]
    VarMismatch { left: usize, right: usize },

    #[error("variable count must be at least 1 (got {0})")]
    NoVariables(usize),

    #[error("variable index w{index} is outside w1..w{k}")]
    VarOutOfRange { index: usize, k: usize },

    #[error("invalid Grassmann context n={n}, k={k}: need 1 <= k <= n-k")]
    InvalidContext { n: u32, k: u32 },

    #[error("degree {j} is outside 0..={max}")]
    DegreeOutOfRange { j: u32, max: u32 },

    #[error("polynomial is not homogeneous of degree {expected}")]
    NotHomogeneous { expected: u32 },

    #[error("polynomial is not homogeneous")]
    Inhomogeneous,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("cache file {path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad arguments rather than by the computation.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            Error::Inconsistent(_) | Error::Io(_) | Error::CacheFormat { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
