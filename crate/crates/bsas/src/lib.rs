//! Behavioral situation assessment from screen-time features.

pub mod baseline;
pub mod binning;
pub mod cue;
pub mod error;
pub mod features;
pub mod forest;
pub mod infocoll;
pub mod metrics;
pub mod pipeline;
pub mod synth;

pub use error::BsasError;
