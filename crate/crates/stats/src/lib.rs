pub mod agreement;
pub mod correlation;
pub mod error;
pub mod histogram;
pub mod itembank;
pub mod pca;
pub mod rank;
pub mod reliability;
pub mod survey;

pub use error::StatsError;
