//! Query-time collective entity resolution.
//!
//! Given an unresolved reference dataset and a name query, the engine extracts
//! the references relevant to the query by alternating attribute and
//! hyper-edge expansion, then partitions them by underlying entity with a
//! greedy relational clustering algorithm.

pub mod analysis;
pub mod config;
pub mod corpus;
pub mod error;
pub mod evalkit;
pub mod expansion;
pub mod query;
pub mod rcer;
pub mod similarity;
pub mod synthgen;

pub use error::{Error, Result};
