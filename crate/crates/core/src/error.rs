use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Coord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cell {0} is out of bounds for a {1}x{2} grid")]
    OutOfBounds(Coord, usize, usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("exploration did not finish within {limit} rounds (coverage {coverage:.4})")]
    RoundLimit { limit: u64, coverage: f64 },

    #[error("invariant violated in round {round}: {what}")]
    Invariant { round: u64, what: String },

    #[error("missing aggregate cell: method `{method}` has no entry for {cell}")]
    MissingCell { method: String, cell: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
