use thiserror::Error;

/// Errors produced by the geometry, sampling and theory routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank deficient: smallest singular value {smallest:e} <= tolerance {tolerance:e}")]
    RankDeficient { smallest: f64, tolerance: f64 },

    #[error("subspaces are not disjoint: juxtaposed basis is rank deficient")]
    NotDisjoint,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("column {0} has zero norm")]
    ZeroColumn(usize),

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("bad angle prescription: {0}")]
    BadAngles(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("empty input")]
    Empty,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
