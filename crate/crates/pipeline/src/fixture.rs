//! Replays claims and labels from a judgment file keyed by query id.
//!
//! Lines are indexed by `query_id` at load time but decoded lazily, so a
//! malformed record only fails the instance that uses it.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use ragcheck_core::model::normalize_text;
use ragcheck_core::records::JudgmentRecord;
use ragcheck_core::{ClaimSource, EntailmentLabel};
use serde::Deserialize;
use serde_json::Value;

use crate::backend::{CheckRequest, ClaimExtractor, EntailmentChecker, ExtractRequest, Reference};
use crate::error::PipelineError;

#[derive(Debug, Default)]
pub struct FixtureStore {
    records: HashMap<String, Value>,
}

impl FixtureStore {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::Fixture(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut records = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(line)
                .map_err(|e| PipelineError::Fixture(format!("line {}: {e}", n + 1)))?;
            let id = value
                .get("query_id")
                .and_then(Value::as_str)
                .ok_or_else(|| PipelineError::Fixture(format!("line {}: no query_id", n + 1)))?
                .to_string();
            records.insert(id, value);
        }
        Ok(FixtureStore { records })
    }

    pub fn record(&self, query_id: &str) -> Result<JudgmentRecord, PipelineError> {
        let value = self
            .records
            .get(query_id)
            .ok_or_else(|| PipelineError::Fixture(format!("no fixture for query {query_id}")))?;
        JudgmentRecord::deserialize(value)
            .map_err(|e| PipelineError::Fixture(format!("query {query_id}: {e}")))
    }
}

pub struct FixtureExtractor {
    store: FixtureStore,
}

impl FixtureExtractor {
    pub fn new(store: FixtureStore) -> Self {
        FixtureExtractor { store }
    }
}

impl ClaimExtractor for FixtureExtractor {
    fn name(&self) -> &'static str {
        "fixture"
    }

    fn extract(&self, req: &ExtractRequest<'_>) -> Result<Vec<String>, PipelineError> {
        let rec = self.store.record(req.query_id)?;
        Ok(match req.source {
            ClaimSource::Response => rec.response_claims,
            ClaimSource::GroundTruth => rec.gt_claims,
        })
    }
}

pub struct FixtureChecker {
    store: FixtureStore,
}

impl FixtureChecker {
    pub fn new(store: FixtureStore) -> Self {
        FixtureChecker { store }
    }
}

fn cell(rows: &[Vec<bool>], row: usize, col: usize, what: &str) -> Result<bool, PipelineError> {
    rows.get(row)
        .and_then(|r| r.get(col))
        .copied()
        .ok_or_else(|| PipelineError::Fixture(format!("{what}[{row}][{col}] out of range")))
}

impl EntailmentChecker for FixtureChecker {
    fn name(&self) -> &'static str {
        "fixture"
    }

    fn check(&self, req: &CheckRequest<'_>) -> Result<Vec<EntailmentLabel>, PipelineError> {
        let rec = self.store.record(req.query_id)?;
        let mut labels = Vec::with_capacity(req.claims.len());
        for claim in req.claims {
            let list = match claim.source {
                ClaimSource::Response => &rec.response_claims,
                ClaimSource::GroundTruth => &rec.gt_claims,
            };
            let i = list
                .iter()
                .position(|t| normalize_text(t) == claim.text)
                .ok_or_else(|| {
                    PipelineError::Fixture(format!(
                        "query {}: claim {:?} not in fixture",
                        req.query_id, claim.text
                    ))
                })?;
            let entailed = match (claim.source, req.reference) {
                (ClaimSource::Response, Reference::GroundTruth) => cell(
                    std::slice::from_ref(&rec.response_vs_gt),
                    0,
                    i,
                    "response_vs_gt",
                )?,
                (ClaimSource::GroundTruth, Reference::Response) => cell(
                    std::slice::from_ref(&rec.gt_vs_response),
                    0,
                    i,
                    "gt_vs_response",
                )?,
                (ClaimSource::Response, Reference::Chunk(j)) => {
                    cell(&rec.response_vs_chunks, i, j, "response_vs_chunks")?
                }
                (ClaimSource::GroundTruth, Reference::Chunk(j)) => {
                    cell(&rec.gt_vs_chunks, i, j, "gt_vs_chunks")?
                }
                (source, reference) => {
                    return Err(PipelineError::Fixture(format!(
                        "no fixture matrix for {source:?} claims against {reference:?}"
                    )))
                }
            };
            labels.push(EntailmentLabel::from_entailed(entailed));
        }
        Ok(labels)
    }
}
