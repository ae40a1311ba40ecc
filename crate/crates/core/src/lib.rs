pub mod chern;
pub mod classical;
pub mod curvature;
pub mod error;
pub mod global;
pub mod report;
pub mod ring;
pub mod series;

pub use error::{Error, Result};
