//! Predicting which members of an online community become inactive.
//!
//! The pipeline turns a timestamped interaction log into windowed network
//! snapshots ([`ingest`]), computes per-member network measures
//! ([`graph`]) and exogenous attributes ([`features`]), and predicts leave
//! labels either with a single-attribute threshold model ([`stm`]) or with
//! supervised classifiers ([`classifier`]). [`eval`] holds the metrics and
//! experiment protocols; [`pipeline`] wires the stages to files for the
//! `decay` binary; [`synth`] generates seeded communities with planted
//! departure rules.

pub mod classifier;
pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod stm;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{Graph, NodeMetrics};
