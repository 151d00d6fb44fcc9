//! Command-line front end: dataset loading, declarative run
//! configuration, the run pipelines, and the artifact writers.

pub mod config;
pub mod dataset;
pub mod error;
pub mod runs;
pub mod svg;
