//! Deterministic multi-agent maze exploration: maze generation, knowledge
//! maps, frontier strategies, a round-based engine, metrics and Copeland
//! ranking, plus the experiment harness behind the `mazex` binary.

pub mod engine;
pub mod error;
pub mod grid;
pub mod harness;
pub mod metrics;
pub mod pathfield;
pub mod ranking;
pub mod render;
pub mod strategy;

pub use error::{Error, Result};
