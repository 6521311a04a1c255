use std::sync::Arc;

use ragcheck_core::EntailmentLabel;

use crate::backend::{CheckRequest, ClaimExtractor, EntailmentChecker, ExtractRequest};
use crate::error::PipelineError;
use crate::judge::prompt::{parse_claims, parse_labels, render_check, render_extract};
use crate::judge::{JudgeClient, JudgePayload, JudgeRole};

pub struct RemoteExtractor {
    client: Arc<JudgeClient>,
}

impl RemoteExtractor {
    pub fn new(client: Arc<JudgeClient>) -> Self {
        RemoteExtractor { client }
    }
}

impl ClaimExtractor for RemoteExtractor {
    fn name(&self) -> &'static str {
        "remote_judge"
    }

    fn extract(&self, req: &ExtractRequest<'_>) -> Result<Vec<String>, PipelineError> {
        let response = self.client.call(
            JudgeRole::Extract,
            render_extract(req.text),
            req.text,
            "",
            |raw| parse_claims(raw).map(JudgePayload::Claims),
        )?;
        match response.payload {
            JudgePayload::Claims(c) => Ok(c),
            JudgePayload::Labels(_) => Err(PipelineError::Cache(
                "labels cached for an extraction".into(),
            )),
        }
    }
}

/// Checks all claims against one reference in a single request, or one
/// request per claim when `per_claim` is set.
pub struct RemoteChecker {
    client: Arc<JudgeClient>,
    per_claim: bool,
}

impl RemoteChecker {
    pub fn new(client: Arc<JudgeClient>, per_claim: bool) -> Self {
        RemoteChecker { client, per_claim }
    }

    fn check_batch(
        &self,
        claims: &[&str],
        reference: &str,
    ) -> Result<Vec<EntailmentLabel>, PipelineError> {
        let expected = claims.len();
        let response = self.client.call(
            JudgeRole::Check,
            render_check(claims.iter().copied(), reference),
            &claims.join("\n"),
            reference,
            |raw| {
                let labels = parse_labels(raw)?;
                if labels.len() != expected {
                    return Err(PipelineError::LabelCount {
                        expected,
                        found: labels.len(),
                    });
                }
                Ok(JudgePayload::Labels(labels))
            },
        )?;
        match response.payload {
            JudgePayload::Labels(l) => Ok(l),
            JudgePayload::Claims(_) => {
                Err(PipelineError::Cache("claims cached for a check".into()))
            }
        }
    }
}

impl EntailmentChecker for RemoteChecker {
    fn name(&self) -> &'static str {
        "remote_judge"
    }

    fn check(&self, req: &CheckRequest<'_>) -> Result<Vec<EntailmentLabel>, PipelineError> {
        let claims: Vec<&str> = req.claims.iter().map(|c| c.text.as_str()).collect();
        if self.per_claim {
            let mut out = Vec::with_capacity(claims.len());
            for claim in claims {
                out.extend(self.check_batch(&[claim], req.reference_text)?);
            }
            Ok(out)
        } else {
            self.check_batch(&claims, req.reference_text)
        }
    }
}
