use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BsasError {
    #[error("need at least {need} values to form {k} bins, got {got}")]
    TooFewValues { need: usize, k: usize, got: usize },
    #[error("class {class} has {count} member(s); every class needs at least {min}")]
    SparseClass { class: usize, count: usize, min: usize },
    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },
    #[error("feature mismatch: {0}")]
    Features(String),
    #[error("importances sum to zero")]
    ZeroImportance,
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("feature matrix: {0}")]
    Format(String),
}

impl From<csv::Error> for BsasError {
    fn from(e: csv::Error) -> Self {
        BsasError::Format(e.to_string())
    }
}
