//! Turns evaluation instances into entailment judgments.
//!
//! Claim extraction and entailment checking are strategies behind the
//! [`ClaimExtractor`] and [`EntailmentChecker`] traits. Implementations are
//! registered by name in a [`Registry`] and picked from configuration at
//! runtime:
//!
//! | kind           | extractor | checker |
//! |----------------|-----------|---------|
//! | `fixture`      | yes       | yes     |
//! | `sentence`     | yes       |         |
//! | `lexical`      |           | yes     |
//! | `remote_judge` | yes       | yes     |

pub mod backend;
pub mod error;
pub mod fixture;
pub mod judge;
pub mod lexical;
pub mod pipeline;
pub mod registry;
pub mod remote;
pub mod sentence;
#[cfg(feature = "test-util")]
pub mod testing;

pub use backend::{
    check_claims, extract_claims, CheckRequest, ClaimExtractor, EntailmentChecker, ExtractRequest,
    Reference,
};
pub use error::{InstanceError, PipelineError};
pub use judge::cache::CacheStore;
pub use judge::retry::RetryPolicy;
pub use judge::{HttpTransport, JudgeClient, JudgeSettings, Transport};
pub use pipeline::{BatchOutcome, Pipeline};
pub use registry::{BackendSpec, BuildContext, Registry};
