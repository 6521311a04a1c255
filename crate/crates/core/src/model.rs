//! Evaluation data model.
//!
//! A [`JudgmentSet`] holds the four boolean entailment matrices every metric
//! is computed from. Membership in "the retrieved context" is always derived as
//! an OR over the per-chunk row, never stored.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::ModelError;

/// One evaluation tuple: query, retrieved chunks, system response and reference answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RagInstance {
    pub query_id: String,
    pub query: String,
    pub gt_answer: String,
    pub response: String,
    /// Retriever rank order; never re-sorted.
    #[serde(rename = "retrieved_context", default)]
    pub retrieved: Vec<RetrievedChunk>,
}

impl RagInstance {
    pub fn k(&self) -> usize {
        self.retrieved.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievedChunk {
    pub doc_id: String,
    pub chunk_index: u32,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClaimSource {
    Response,
    GroundTruth,
}

/// Lowercase, Unicode NFC, whitespace runs collapsed to a single space, trimmed.
pub fn normalize_text(text: &str) -> String {
    let lowered: String = text.nfc().collect::<String>().to_lowercase();
    lowered.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub id: usize,
    pub text: String,
    pub source: ClaimSource,
}

impl Claim {
    /// Builds a claim list, rejecting empty or duplicate texts.
    pub fn list<I, S>(source: ClaimSource, texts: I) -> Result<Vec<Claim>, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for raw in texts {
            let text = normalize_text(raw.as_ref());
            if text.is_empty() {
                return Err(ModelError::EmptyClaim);
            }
            if !seen.insert(text.clone()) {
                return Err(ModelError::DuplicateClaim { side: source, text });
            }
            out.push(Claim {
                id: out.len(),
                text,
                source,
            });
        }
        Ok(out)
    }

    /// Builds a claim list from extractor output: empties are dropped and only
    /// the first occurrence of each normalized text is kept.
    pub fn dedup_list<I, S>(source: ClaimSource, texts: I) -> Vec<Claim>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for raw in texts {
            let text = normalize_text(raw.as_ref());
            if text.is_empty() || !seen.insert(text.clone()) {
                continue;
            }
            out.push(Claim {
                id: out.len(),
                text,
                source,
            });
        }
        out
    }
}

/// Three-way checker output. Only `Entailment` counts as membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntailmentLabel {
    Entailment,
    Neutral,
    Contradiction,
}

impl EntailmentLabel {
    pub fn is_entailed(self) -> bool {
        matches!(self, EntailmentLabel::Entailment)
    }

    pub fn from_entailed(entailed: bool) -> Self {
        if entailed {
            EntailmentLabel::Entailment
        } else {
            EntailmentLabel::Neutral
        }
    }
}

impl fmt::Display for EntailmentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntailmentLabel::Entailment => "Entailment",
            EntailmentLabel::Neutral => "Neutral",
            EntailmentLabel::Contradiction => "Contradiction",
        })
    }
}

/// Unvalidated matrices; convert with [`JudgmentSet::try_from`].
#[derive(Debug, Clone, Default)]
pub struct JudgmentParts {
    pub response_claims: Vec<Claim>,
    pub gt_claims: Vec<Claim>,
    pub response_vs_gt: Vec<bool>,
    pub gt_vs_response: Vec<bool>,
    pub response_vs_chunks: Vec<Vec<bool>>,
    pub gt_vs_chunks: Vec<Vec<bool>>,
    pub k: usize,
}

/// Entailment judgments for one instance. Dimensions are checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentSet {
    response_claims: Vec<Claim>,
    gt_claims: Vec<Claim>,
    response_vs_gt: Vec<bool>,
    gt_vs_response: Vec<bool>,
    response_vs_chunks: Vec<Vec<bool>>,
    gt_vs_chunks: Vec<Vec<bool>>,
    k: usize,
}

fn check_vector(matrix: &'static str, v: &[bool], expected: usize) -> Result<(), ModelError> {
    if v.len() != expected {
        return Err(ModelError::RowCount {
            matrix,
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

fn check_matrix(
    matrix: &'static str,
    m: &[Vec<bool>],
    rows: usize,
    cols: usize,
) -> Result<(), ModelError> {
    if m.len() != rows {
        return Err(ModelError::RowCount {
            matrix,
            expected: rows,
            found: m.len(),
        });
    }
    for (row, r) in m.iter().enumerate() {
        if r.len() != cols {
            return Err(ModelError::ColumnCount {
                matrix,
                row,
                expected: cols,
                found: r.len(),
            });
        }
    }
    Ok(())
}

fn check_claims(claims: &[Claim], expected: ClaimSource) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for (index, c) in claims.iter().enumerate() {
        if c.source != expected {
            return Err(ModelError::WrongSource {
                index,
                expected,
                found: c.source,
            });
        }
        if c.text.is_empty() {
            return Err(ModelError::EmptyClaim);
        }
        if !seen.insert(c.text.as_str()) {
            return Err(ModelError::DuplicateClaim {
                side: expected,
                text: c.text.clone(),
            });
        }
    }
    Ok(())
}

impl TryFrom<JudgmentParts> for JudgmentSet {
    type Error = ModelError;

    fn try_from(p: JudgmentParts) -> Result<Self, ModelError> {
        let m = p.response_claims.len();
        let g = p.gt_claims.len();
        if g == 0 {
            return Err(ModelError::NoGroundTruthClaims);
        }
        check_claims(&p.response_claims, ClaimSource::Response)?;
        check_claims(&p.gt_claims, ClaimSource::GroundTruth)?;
        check_vector("response_vs_gt", &p.response_vs_gt, m)?;
        check_vector("gt_vs_response", &p.gt_vs_response, g)?;
        check_matrix("response_vs_chunks", &p.response_vs_chunks, m, p.k)?;
        check_matrix("gt_vs_chunks", &p.gt_vs_chunks, g, p.k)?;
        Ok(JudgmentSet {
            response_claims: p.response_claims,
            gt_claims: p.gt_claims,
            response_vs_gt: p.response_vs_gt,
            gt_vs_response: p.gt_vs_response,
            response_vs_chunks: p.response_vs_chunks,
            gt_vs_chunks: p.gt_vs_chunks,
            k: p.k,
        })
    }
}

impl JudgmentSet {
    pub fn response_claims(&self) -> &[Claim] {
        &self.response_claims
    }
    pub fn gt_claims(&self) -> &[Claim] {
        &self.gt_claims
    }
    pub fn response_vs_gt(&self) -> &[bool] {
        &self.response_vs_gt
    }
    pub fn gt_vs_response(&self) -> &[bool] {
        &self.gt_vs_response
    }
    pub fn response_vs_chunks(&self) -> &[Vec<bool>] {
        &self.response_vs_chunks
    }
    pub fn gt_vs_chunks(&self) -> &[Vec<bool>] {
        &self.gt_vs_chunks
    }
    /// Number of response claims (M).
    pub fn m(&self) -> usize {
        self.response_claims.len()
    }
    /// Number of ground-truth claims (G).
    pub fn g(&self) -> usize {
        self.gt_claims.len()
    }
    /// Number of retrieved chunks.
    pub fn k(&self) -> usize {
        self.k
    }

    fn chunk_matrix(&self, side: ClaimSide) -> &[Vec<bool>] {
        match side {
            ClaimSide::Response => &self.response_vs_chunks,
            ClaimSide::GroundTruth => &self.gt_vs_chunks,
        }
    }

    pub fn into_parts(self) -> JudgmentParts {
        JudgmentParts {
            response_claims: self.response_claims,
            gt_claims: self.gt_claims,
            response_vs_gt: self.response_vs_gt,
            gt_vs_response: self.gt_vs_response,
            response_vs_chunks: self.response_vs_chunks,
            gt_vs_chunks: self.gt_vs_chunks,
            k: self.k,
        }
    }
}

/// Per-chunk relevance: `relevant[j]` iff some ground-truth claim is entailed by chunk j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkClassification {
    pub relevant: Vec<bool>,
}

impl ChunkClassification {
    pub fn n_relevant(&self) -> usize {
        self.relevant.iter().filter(|r| **r).count()
    }
}

pub fn classify_chunks(judgments: &JudgmentSet) -> ChunkClassification {
    let mut relevant = vec![false; judgments.k()];
    for row in judgments.gt_vs_chunks() {
        for (slot, entailed) in relevant.iter_mut().zip(row) {
            *slot |= *entailed;
        }
    }
    ChunkClassification { relevant }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimSide {
    Response,
    GroundTruth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkScope {
    AllChunks,
    RelevantChunks,
    IrrelevantChunks,
}

impl ChunkScope {
    fn includes(self, relevant: bool) -> bool {
        match self {
            ChunkScope::AllChunks => true,
            ChunkScope::RelevantChunks => relevant,
            ChunkScope::IrrelevantChunks => !relevant,
        }
    }
}

/// Element i is true iff claim i is entailed by at least one chunk within `scope`.
pub fn claim_membership(judgments: &JudgmentSet, side: ClaimSide, scope: ChunkScope) -> Vec<bool> {
    let classification = classify_chunks(judgments);
    membership_with(judgments, &classification, side, scope)
}

pub(crate) fn membership_with(
    judgments: &JudgmentSet,
    classification: &ChunkClassification,
    side: ClaimSide,
    scope: ChunkScope,
) -> Vec<bool> {
    judgments
        .chunk_matrix(side)
        .iter()
        .map(|row| {
            row.iter()
                .zip(&classification.relevant)
                .any(|(entailed, relevant)| *entailed && scope.includes(*relevant))
        })
        .collect()
}

/// A problem found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyField(&'static str),
    EmptyChunkText { position: usize },
    EmptyDocId { position: usize },
    DuplicateChunk { doc_id: String, chunk_index: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyField(name) => write!(f, "{name} empty"),
            Violation::EmptyChunkText { position } => {
                write!(f, "retrieved chunk at position {position} has empty text")
            }
            Violation::EmptyDocId { position } => {
                write!(f, "retrieved chunk at position {position} has empty doc_id")
            }
            Violation::DuplicateChunk {
                doc_id,
                chunk_index,
            } => write!(f, "duplicate chunk ({doc_id}, {chunk_index})"),
        }
    }
}

/// Reports problems with a single instance. Duplicate query ids are a dataset-level check.
pub fn validate_instance(instance: &RagInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    if instance.query_id.trim().is_empty() {
        out.push(Violation::EmptyField("query_id"));
    }
    if instance.query.trim().is_empty() {
        out.push(Violation::EmptyField("query"));
    }
    if instance.gt_answer.trim().is_empty() {
        out.push(Violation::EmptyField("gt_answer"));
    }
    let mut keys = HashSet::new();
    for (position, chunk) in instance.retrieved.iter().enumerate() {
        if chunk.doc_id.is_empty() {
            out.push(Violation::EmptyDocId { position });
        }
        if chunk.text.trim().is_empty() {
            out.push(Violation::EmptyChunkText { position });
        }
        if !keys.insert((chunk.doc_id.as_str(), chunk.chunk_index)) {
            out.push(Violation::DuplicateChunk {
                doc_id: chunk.doc_id.clone(),
                chunk_index: chunk.chunk_index,
            });
        }
    }
    out
}
