//! Event-log ingestion, symbolic state abstraction, sequence distances and
//! team performance scoring for serious-game play traces.

pub mod abstraction;
pub mod adaptscore;
pub mod catalog;
pub mod distance;
pub mod error;
pub mod model;
pub mod perfscore;
pub mod states;

pub use error::{AbstractionError, CatalogError, DistanceError, EventError, FormatError, ScoreError};
