//! Claim-level evaluation of retrieval-augmented generation systems.
//!
//! The crate is split into:
//! - [`model`]: instances, claims, entailment judgments and chunk classification
//! - [`metrics`]: the per-query metric suite and dataset aggregation
//! - [`meta_eval`]: correlation of metric score differences with human preferences
//! - [`records`]: line-delimited on-disk record schemas

pub mod error;
pub mod meta_eval;
pub mod metrics;
pub mod model;
pub mod records;

pub use error::{MetaEvalError, ModelError};
pub use metrics::{aggregate, compute_all, AggregateReport, Metric, MetricsRecord};
pub use model::{
    claim_membership, classify_chunks, validate_instance, ChunkClassification, ChunkScope, Claim,
    ClaimSide, ClaimSource, EntailmentLabel, JudgmentSet, RagInstance, RetrievedChunk, Violation,
};
