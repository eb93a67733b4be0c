pub mod conedoff;
pub mod constructions;
pub mod corpus;
pub mod error;
pub mod format;
pub mod ggraph;
pub mod graph;
pub mod group;
pub mod metrics;

pub use error::{Error, Result};
