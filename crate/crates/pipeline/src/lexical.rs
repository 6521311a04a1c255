use ragcheck_core::model::normalize_text;
use ragcheck_core::EntailmentLabel;

use crate::backend::{CheckRequest, EntailmentChecker};
use crate::error::PipelineError;

/// Entailment iff the normalized claim is a contiguous substring of the
/// normalized reference; otherwise neutral. Never reports contradiction.
#[derive(Debug, Default, Clone, Copy)]
pub struct LexicalChecker;

pub fn lexically_entailed(claim: &str, reference: &str) -> bool {
    normalize_text(reference).contains(&normalize_text(claim))
}

impl EntailmentChecker for LexicalChecker {
    fn name(&self) -> &'static str {
        "lexical"
    }

    fn check(&self, req: &CheckRequest<'_>) -> Result<Vec<EntailmentLabel>, PipelineError> {
        let reference = normalize_text(req.reference_text);
        Ok(req
            .claims
            .iter()
            .map(|c| EntailmentLabel::from_entailed(reference.contains(&normalize_text(&c.text))))
            .collect())
    }
}
