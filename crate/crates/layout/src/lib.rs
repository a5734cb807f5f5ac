pub mod document;
pub mod error;
pub mod graph;
pub mod mds;
pub mod service;

pub use document::{analyze, Analysis, LayoutDocument, LayoutInputs, SCHEMA_VERSION};
pub use error::LayoutError;
