use std::fmt;

use ragcheck_core::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("transport: {message}")]
    Transport {
        message: String,
        status: Option<u16>,
        retriable: bool,
    },
    /// The judge answered but the content could not be parsed.
    #[error("unparseable judge response ({reason}): {raw:?}")]
    Parse { reason: String, raw: String },
    #[error("checker returned {found} labels for {expected} claims")]
    LabelCount { expected: usize, found: usize },
    #[error("ground-truth answer produced no claims")]
    NoGroundTruthClaims,
    #[error("fixture: {0}")]
    Fixture(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("gave up after {attempts} attempts, last error: {last}")]
    RetriesExhausted {
        attempts: u32,
        last: Box<PipelineError>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl PipelineError {
    pub fn is_retriable(&self) -> bool {
        match self {
            PipelineError::Transport { retriable, .. } => *retriable,
            PipelineError::Parse { .. } => true,
            _ => false,
        }
    }
}

/// A failure attributed to one instance of a batch.
#[derive(Debug)]
pub struct InstanceError {
    /// Position in the input batch.
    pub index: usize,
    pub query_id: String,
    pub error: PipelineError,
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "query {}: {}", self.query_id, self.error)
    }
}

impl std::error::Error for InstanceError {}
