use ragcheck_core::{Claim, ClaimSource, EntailmentLabel};

use crate::error::PipelineError;

#[derive(Debug, Clone, Copy)]
pub struct ExtractRequest<'a> {
    pub query_id: &'a str,
    pub text: &'a str,
    pub source: ClaimSource,
}

/// Decomposes a text into claim strings. Output is normalized and
/// deduplicated by [`extract_claims`], not by implementations.
pub trait ClaimExtractor: Send + Sync {
    fn name(&self) -> &'static str;
    fn extract(&self, req: &ExtractRequest<'_>) -> Result<Vec<String>, PipelineError>;
}

/// Which text a claim list is being checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    GroundTruth,
    Response,
    Chunk(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct CheckRequest<'a> {
    pub query_id: &'a str,
    pub claims: &'a [Claim],
    pub reference: Reference,
    pub reference_text: &'a str,
}

/// Labels every claim against one reference text, order-aligned with the claims.
pub trait EntailmentChecker: Send + Sync {
    fn name(&self) -> &'static str;
    fn check(&self, req: &CheckRequest<'_>) -> Result<Vec<EntailmentLabel>, PipelineError>;
}

pub fn extract_claims(
    extractor: &dyn ClaimExtractor,
    req: &ExtractRequest<'_>,
) -> Result<Vec<Claim>, PipelineError> {
    let raw = if req.text.trim().is_empty() {
        Vec::new()
    } else {
        extractor.extract(req)?
    };
    let claims = Claim::dedup_list(req.source, raw);
    if claims.is_empty() && req.source == ClaimSource::GroundTruth {
        return Err(PipelineError::NoGroundTruthClaims);
    }
    Ok(claims)
}

pub fn check_claims(
    checker: &dyn EntailmentChecker,
    req: &CheckRequest<'_>,
) -> Result<Vec<EntailmentLabel>, PipelineError> {
    if req.claims.is_empty() {
        return Ok(Vec::new());
    }
    let labels = checker.check(req)?;
    if labels.len() != req.claims.len() {
        return Err(PipelineError::LabelCount {
            expected: req.claims.len(),
            found: labels.len(),
        });
    }
    Ok(labels)
}
