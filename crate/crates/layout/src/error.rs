use teamtrace_core::{DistanceError, ScoreError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("distance matrix: {0}")]
    Matrix(String),
    #[error("no sequences to lay out")]
    Empty,
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Score(#[from] ScoreError),
}
