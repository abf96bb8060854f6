use thiserror::Error;

/// Errors produced by the analysis routines and the data readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series is empty")]
    Empty,

    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },

    #[error("value {value} at index {index} is not strictly positive")]
    NonPositive { index: usize, value: f64 },

    #[error("time index is not strictly increasing at position {position}")]
    IndexNotIncreasing { position: usize },

    #[error("time index has {found} stamps but the series has {expected} values")]
    IndexLength { expected: usize, found: usize },

    #[error("need at least {needed} observations, got {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("deflator does not cover the nominal series; missing: {}", missing.join(", "))]
    Alignment { missing: Vec<String> },

    #[error("series indexes are not comparable: {0}")]
    IncompatibleIndex(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("variance estimate is zero; the fluctuation process is undefined")]
    DegenerateScale,

    #[error("moving-sum window of {window} observations is too small (need at least 2)")]
    WindowTooSmall { window: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{m} breaks with minimum segment length {min_len} do not fit into {n} observations")]
    Infeasible { m: usize, min_len: usize, n: usize },

    #[error("segmentation does not match series: {0}")]
    InconsistentSegmentation(String),

    #[error("missing value inside the series at {date}")]
    Gap { date: String },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
