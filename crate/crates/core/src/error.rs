//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("column '{0}' has zero variance")]
    ZeroVariance(String),

    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("qualitative column '{0}' has fewer than 2 distinct categories")]
    SingleCategory(String),

    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),

    #[error("column '{name}' has {got} entries, expected {expected}")]
    LengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },

    #[error("missing or non-finite value in column '{column}' at row {row}")]
    MissingValue { column: String, row: usize },

    #[error("table has no columns")]
    EmptyTable,

    #[error("k = {k} exceeds the rank {rank} of the decomposition")]
    KTooLarge { k: usize, rank: usize },

    #[error("k = {k} is below the minimum {min} for this operation")]
    KTooSmall { k: usize, min: usize },

    #[error("input matrix has rank zero")]
    DegenerateInput,

    #[error("index sets do not partition the {expected} loading rows")]
    IndexSetMismatch { expected: usize },

    #[error("invalid simulation configuration: {0}")]
    InvalidSimConfig(String),

    #[error("rotation paths disagree: max squared-loading deviation {max_dev:e} at (n={n}, p={p})")]
    PathMismatch { n: usize, p: usize, max_dev: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
