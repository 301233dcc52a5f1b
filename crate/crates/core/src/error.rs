use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// `Usage` covers violated preconditions on caller input; the remaining
/// variants signal that an exact identity which must hold did not, or that
/// an external file could not be ingested.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),

    #[error("inexact division: {0}")]
    InexactDivision(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("rank {rank}: {check}")]
    Computation { rank: u32, check: String },

    #[error("smooth table, rank {rank}: {check}")]
    Ingestion { rank: u32, check: String },

    #[error("malformed input: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn computation(rank: u32, check: impl Into<String>) -> Self {
        Error::Computation {
            rank,
            check: check.into(),
        }
    }

    /// True for errors caused by bad caller input rather than a failed
    /// computation.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
