use chrono::{DateTime, Utc};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series must contain at least one value")]
    EmptySeries,

    #[error("series value at index {index} is not finite")]
    NonFinite { index: usize },

    #[error("timestamp {0} is not on a whole hour")]
    NotWholeHour(DateTime<Utc>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("log argument P + c = {value} is not positive at index {index}")]
    NonPositiveArgument { index: usize, value: f64 },

    #[error("calendar mismatch: {0}")]
    Alignment(String),

    #[error("series has zero variance")]
    DegenerateSeries,

    #[error("series too short: need more than {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("presample too short: need {needed} values, got {got}")]
    InsufficientPresample { needed: usize, got: usize },

    #[error("parameters are not stationary/invertible: {0}")]
    UnstableParameters(String),

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("invalid GARCH parameters: {0}")]
    InvalidParameters(String),

    #[error("exogenous future values missing: {0}")]
    MissingExogenousFuture(String),

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("every term of the improvement index was excluded (|RTLMP - DALMP| <= epsilon)")]
    AllTermsExcluded,

    #[error("reports do not share a test window: {0}")]
    MismatchedWindows(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing hour {} in input data", .0.format("%Y-%m-%dT%H:%MZ"))]
    Gap(DateTime<Utc>),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
