//! Temporal model-based diagnosis over qualitative interval relations.
//!
//! The crate is layered bottom-up: [`sia`] holds the interval algebra and its
//! constraint networks, [`model`] the behavioral knowledge base,
//! [`observations`] the abstraction of point data into intervals, and
//! [`engine`] candidate generation and diagnosis.

pub mod engine;
pub mod model;
pub mod observations;
pub mod sia;
pub mod time;

pub use time::Time;
