//! On-disk record schemas. Every file is line-delimited JSON, one record per line.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::metrics::{AggregateReport, Metric, MetricsRecord};
use crate::model::{Claim, ClaimSource, JudgmentParts, JudgmentSet};

pub use crate::meta_eval::PreferencePair as PairsRecord;
pub use crate::model::RagInstance as DatasetRecord;

/// Query id used for the dataset-level line of a report.
pub const AGGREGATE_ID: &str = "__aggregate__";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub query_id: String,
    pub response_claims: Vec<String>,
    pub gt_claims: Vec<String>,
    pub response_vs_gt: Vec<bool>,
    pub gt_vs_response: Vec<bool>,
    pub response_vs_chunks: Vec<Vec<bool>>,
    pub gt_vs_chunks: Vec<Vec<bool>>,
}

impl JudgmentRecord {
    pub fn from_judgments(query_id: impl Into<String>, j: &JudgmentSet) -> Self {
        let texts = |cs: &[Claim]| cs.iter().map(|c| c.text.clone()).collect();
        JudgmentRecord {
            query_id: query_id.into(),
            response_claims: texts(j.response_claims()),
            gt_claims: texts(j.gt_claims()),
            response_vs_gt: j.response_vs_gt().to_vec(),
            gt_vs_response: j.gt_vs_response().to_vec(),
            response_vs_chunks: j.response_vs_chunks().to_vec(),
            gt_vs_chunks: j.gt_vs_chunks().to_vec(),
        }
    }

    /// Number of chunks implied by the matrices.
    pub fn k(&self) -> usize {
        self.gt_vs_chunks
            .first()
            .or(self.response_vs_chunks.first())
            .map_or(0, Vec::len)
    }

    pub fn to_judgments(&self) -> Result<JudgmentSet, ModelError> {
        JudgmentSet::try_from(JudgmentParts {
            response_claims: Claim::list(ClaimSource::Response, &self.response_claims)?,
            gt_claims: Claim::list(ClaimSource::GroundTruth, &self.gt_claims)?,
            response_vs_gt: self.response_vs_gt.clone(),
            gt_vs_response: self.gt_vs_response.clone(),
            response_vs_chunks: self.response_vs_chunks.clone(),
            gt_vs_chunks: self.gt_vs_chunks.clone(),
            k: self.k(),
        })
    }
}

/// All eleven metrics in report column order; `null` when undefined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub claim_recall: Option<f64>,
    pub context_precision: Option<f64>,
    pub context_utilization: Option<f64>,
    pub ns_relevant: Option<f64>,
    pub ns_irrelevant: Option<f64>,
    pub hallucination: Option<f64>,
    pub self_knowledge: Option<f64>,
    pub faithfulness: Option<f64>,
}

impl MetricValues {
    fn slot(&mut self, metric: Metric) -> &mut Option<f64> {
        match metric {
            Metric::Precision => &mut self.precision,
            Metric::Recall => &mut self.recall,
            Metric::F1 => &mut self.f1,
            Metric::ClaimRecall => &mut self.claim_recall,
            Metric::ContextPrecision => &mut self.context_precision,
            Metric::ContextUtilization => &mut self.context_utilization,
            Metric::NsRelevant => &mut self.ns_relevant,
            Metric::NsIrrelevant => &mut self.ns_irrelevant,
            Metric::Hallucination => &mut self.hallucination,
            Metric::SelfKnowledge => &mut self.self_knowledge,
            Metric::Faithfulness => &mut self.faithfulness,
        }
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        let mut copy = *self;
        *copy.slot(metric)
    }

    fn from_iter(values: impl Iterator<Item = (Metric, Option<f64>)>) -> Self {
        let mut out = MetricValues::default();
        for (m, v) in values {
            *out.slot(m) = v;
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DefinedCounts {
    pub precision: usize,
    pub recall: usize,
    pub f1: usize,
    pub claim_recall: usize,
    pub context_precision: usize,
    pub context_utilization: usize,
    pub ns_relevant: usize,
    pub ns_irrelevant: usize,
    pub hallucination: usize,
    pub self_knowledge: usize,
    pub faithfulness: usize,
}

impl DefinedCounts {
    fn from_fn(f: impl Fn(Metric) -> usize) -> Self {
        DefinedCounts {
            precision: f(Metric::Precision),
            recall: f(Metric::Recall),
            f1: f(Metric::F1),
            claim_recall: f(Metric::ClaimRecall),
            context_precision: f(Metric::ContextPrecision),
            context_utilization: f(Metric::ContextUtilization),
            ns_relevant: f(Metric::NsRelevant),
            ns_irrelevant: f(Metric::NsIrrelevant),
            hallucination: f(Metric::Hallucination),
            self_knowledge: f(Metric::SelfKnowledge),
            faithfulness: f(Metric::Faithfulness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub m: usize,
    pub g: usize,
    pub k: usize,
    pub defined: DefinedCounts,
    /// Aggregate line only: number of per-query records averaged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_records: Option<usize>,
    /// Aggregate line only: unrounded mean response-claim count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_m: Option<f64>,
}

/// Retrieval settings of the evaluated system, copied into reports as-is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunMetadata {
    pub chunk_size: u32,
    pub chunk_overlap_ratio: f64,
    pub top_k: u32,
}

impl Default for RunMetadata {
    fn default() -> Self {
        RunMetadata {
            chunk_size: 300,
            chunk_overlap_ratio: 0.2,
            top_k: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub query_id: String,
    pub metrics: MetricValues,
    pub counts: ReportCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<RunMetadata>,
}

impl ReportRecord {
    pub fn per_query(query_id: impl Into<String>, r: &MetricsRecord) -> Self {
        ReportRecord {
            query_id: query_id.into(),
            metrics: MetricValues::from_iter(r.iter()),
            counts: ReportCounts {
                m: r.n_response_claims,
                g: r.n_gt_claims,
                k: r.k,
                defined: DefinedCounts::from_fn(|m| r.get(m).is_some() as usize),
                n_records: None,
                mean_m: None,
            },
            metadata: None,
        }
    }

    pub fn aggregate(a: &AggregateReport, metadata: Option<RunMetadata>) -> Self {
        ReportRecord {
            query_id: AGGREGATE_ID.to_string(),
            metrics: MetricValues::from_iter(a.iter()),
            counts: ReportCounts {
                m: a.claim_display() as usize,
                g: a.mean_gt_claims.round() as usize,
                k: a.mean_k.round() as usize,
                defined: DefinedCounts::from_fn(|m| a.defined(m)),
                n_records: Some(a.n_records),
                mean_m: Some(a.mean_response_claims),
            },
            metadata,
        }
    }

    pub fn is_aggregate(&self) -> bool {
        self.query_id == AGGREGATE_ID
    }
}
