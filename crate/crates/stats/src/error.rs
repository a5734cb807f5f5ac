use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {need} {what}, got {got}")]
    TooFew { what: &'static str, need: usize, got: usize },
    #[error("{0} has zero variance")]
    ZeroVariance(String),
    #[error("ragged input: {0}")]
    Shape(String),
    #[error("value {value} outside {lo}..={hi} at {at}")]
    OutOfRange { value: i64, lo: i64, hi: i64, at: String },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("survey file: {0}")]
    Format(String),
}

impl From<csv::Error> for StatsError {
    fn from(e: csv::Error) -> Self {
        StatsError::Format(e.to_string())
    }
}
