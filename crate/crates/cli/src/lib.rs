//! The `teamtrace` command line.

pub mod analysis;
pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod simulate;

pub use app::run;
pub use error::CliError;
