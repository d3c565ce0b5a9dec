use thiserror::Error;

use crate::rational::{ParseRationalError, Rational};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Rational(#[from] ParseRationalError),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("space must contain at least one point")]
    EmptySpace,

    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("negative distance at d[{row}][{col}]")]
    NegativeEntry { row: usize, col: usize },

    #[error("invalid quasi-pseudometric: {0}")]
    InvalidSpace(String),

    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("{0}")]
    Precondition(#[from] Precondition),

    /// A solver or selection rule broke an internal contract. Never caused by
    /// user input.
    #[error("internal fault: {0}")]
    Fault(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Rejections of well-formed input that does not meet a theorem's
/// hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Precondition {
    #[error("objective is not proper (every value is inf)")]
    ImproperObjective,

    #[error("{name} must be positive")]
    NonPositive { name: &'static str },

    #[error("radius must be positive")]
    NonPositiveRadius,

    #[error("start point `{0}` is outside dom phi")]
    OutsideDomain(String),

    #[error("phi(x0) exceeds eps + inf phi by {gap}")]
    EkelandGap { gap: Rational },

    #[error("phi is not lsc: `{x}` <=_d `{y}` but phi({x}) > phi({y})")]
    NotLsc { x: String, y: String },

    #[error("Caristi premise fails at `{0}`: T(x) misses S(x)")]
    CaristiPremise(String),

    #[error("map must assign a nonempty value to `{0}`")]
    IncompleteMap(String),

    #[error("truncation level must be at least 2, got {0}")]
    TruncationTooSmall(usize),

    #[error("{0}")]
    Other(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Rejected,
    Fault,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Fault(_) => ErrorKind::Fault,
            _ => ErrorKind::Rejected,
        }
    }

    pub(crate) fn fault(msg: impl Into<String>) -> Self {
        Error::Fault(msg.into())
    }
}
