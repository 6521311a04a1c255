//! Per-query metric suite and dataset aggregation.
//!
//! Every response claim falls into exactly one of four buckets: correct,
//! incorrect-in-relevant-chunk, incorrect-only-in-irrelevant-chunk,
//! incorrect-in-no-chunk. A claim entailed by both a relevant and an irrelevant
//! chunk is counted toward relevant noise sensitivity only.
//!
//! A metric whose denominator is zero is `None` and is excluded from
//! aggregation rather than coerced.

use std::fmt;
use std::str::FromStr;

use crate::error::ModelError;
use crate::model::{
    classify_chunks, membership_with, ChunkClassification, ChunkScope, ClaimSide, JudgmentSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Precision,
    Recall,
    F1,
    ClaimRecall,
    ContextPrecision,
    ContextUtilization,
    NsRelevant,
    NsIrrelevant,
    Hallucination,
    SelfKnowledge,
    Faithfulness,
}

impl Metric {
    /// Report column order: overall, retriever, generator.
    pub const ALL: [Metric; 11] = [
        Metric::Precision,
        Metric::Recall,
        Metric::F1,
        Metric::ClaimRecall,
        Metric::ContextPrecision,
        Metric::ContextUtilization,
        Metric::NsRelevant,
        Metric::NsIrrelevant,
        Metric::Hallucination,
        Metric::SelfKnowledge,
        Metric::Faithfulness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
            Metric::ClaimRecall => "claim_recall",
            Metric::ContextPrecision => "context_precision",
            Metric::ContextUtilization => "context_utilization",
            Metric::NsRelevant => "ns_relevant",
            Metric::NsIrrelevant => "ns_irrelevant",
            Metric::Hallucination => "hallucination",
            Metric::SelfKnowledge => "self_knowledge",
            Metric::Faithfulness => "faithfulness",
        }
    }

    /// Short column header used by the table renderer.
    pub fn column(self) -> &'static str {
        match self {
            Metric::Precision => "Prec.",
            Metric::Recall => "Rec.",
            Metric::F1 => "F1",
            Metric::ClaimRecall => "CR",
            Metric::ContextPrecision => "CP",
            Metric::ContextUtilization => "CU",
            Metric::NsRelevant => "NS(I)",
            Metric::NsIrrelevant => "NS(II)",
            Metric::Hallucination => "Hallu.",
            Metric::SelfKnowledge => "SK",
            Metric::Faithfulness => "Faith.",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn count(v: impl IntoIterator<Item = bool>) -> usize {
    v.into_iter().filter(|b| *b).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverallMetrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

pub fn overall_metrics(j: &JudgmentSet) -> OverallMetrics {
    let precision = ratio(count(j.response_vs_gt().iter().copied()), j.m());
    let recall = ratio(count(j.gt_vs_response().iter().copied()), j.g());
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    OverallMetrics {
        precision,
        recall,
        f1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrieverMetrics {
    pub claim_recall: Option<f64>,
    pub context_precision: Option<f64>,
}

pub fn retriever_metrics(j: &JudgmentSet, c: &ChunkClassification) -> RetrieverMetrics {
    let gt_in_context = membership_with(j, c, ClaimSide::GroundTruth, ChunkScope::AllChunks);
    RetrieverMetrics {
        claim_recall: ratio(count(gt_in_context), j.g()),
        context_precision: ratio(c.n_relevant(), j.k()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMetrics {
    pub context_utilization: Option<f64>,
    pub ns_relevant: Option<f64>,
    pub ns_irrelevant: Option<f64>,
    pub hallucination: Option<f64>,
    pub self_knowledge: Option<f64>,
    pub faithfulness: Option<f64>,
}

pub fn generator_metrics(j: &JudgmentSet, c: &ChunkClassification) -> GeneratorMetrics {
    let in_relevant = membership_with(j, c, ClaimSide::Response, ChunkScope::RelevantChunks);
    let in_irrelevant = membership_with(j, c, ClaimSide::Response, ChunkScope::IrrelevantChunks);

    let (mut faithful, mut ns_rel, mut ns_irr, mut hallu, mut sk) = (0, 0, 0, 0, 0);
    for ((&correct, &rel), &irr) in j
        .response_vs_gt()
        .iter()
        .zip(&in_relevant)
        .zip(&in_irrelevant)
    {
        let in_context = rel || irr;
        faithful += in_context as usize;
        match (correct, in_context) {
            (true, false) => sk += 1,
            (false, false) => hallu += 1,
            (false, true) if rel => ns_rel += 1,
            (false, true) => ns_irr += 1,
            (true, true) => {}
        }
    }

    let gt_in_context = membership_with(j, c, ClaimSide::GroundTruth, ChunkScope::AllChunks);
    let retrieved = count(gt_in_context.iter().copied());
    let used = count(
        gt_in_context
            .iter()
            .zip(j.gt_vs_response())
            .map(|(a, b)| *a && *b),
    );

    let m = j.m();
    GeneratorMetrics {
        context_utilization: ratio(used, retrieved),
        ns_relevant: ratio(ns_rel, m),
        ns_irrelevant: ratio(ns_irr, m),
        hallucination: ratio(hallu, m),
        self_knowledge: ratio(sk, m),
        faithfulness: ratio(faithful, m),
    }
}

/// All metrics for one query plus its claim and chunk counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    values: [Option<f64>; 11],
    pub n_response_claims: usize,
    pub n_gt_claims: usize,
    pub k: usize,
}

impl MetricsRecord {
    pub fn new(n_response_claims: usize, n_gt_claims: usize, k: usize) -> Self {
        MetricsRecord {
            values: [None; 11],
            n_response_claims,
            n_gt_claims,
            k,
        }
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        self.values[metric.index()]
    }

    pub fn set(&mut self, metric: Metric, value: Option<f64>) {
        self.values[metric.index()] = value;
    }

    pub fn with(mut self, metric: Metric, value: Option<f64>) -> Self {
        self.set(metric, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (Metric, Option<f64>)> + '_ {
        Metric::ALL.into_iter().map(|m| (m, self.get(m)))
    }
}

pub fn compute_all(j: &JudgmentSet) -> MetricsRecord {
    let classification = classify_chunks(j);
    let o = overall_metrics(j);
    let r = retriever_metrics(j, &classification);
    let g = generator_metrics(j, &classification);
    MetricsRecord::new(j.m(), j.g(), j.k())
        .with(Metric::Precision, o.precision)
        .with(Metric::Recall, o.recall)
        .with(Metric::F1, o.f1)
        .with(Metric::ClaimRecall, r.claim_recall)
        .with(Metric::ContextPrecision, r.context_precision)
        .with(Metric::ContextUtilization, g.context_utilization)
        .with(Metric::NsRelevant, g.ns_relevant)
        .with(Metric::NsIrrelevant, g.ns_irrelevant)
        .with(Metric::Hallucination, g.hallucination)
        .with(Metric::SelfKnowledge, g.self_knowledge)
        .with(Metric::Faithfulness, g.faithfulness)
}

/// Macro-averaged dataset report.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    means: [Option<f64>; 11],
    defined: [usize; 11],
    pub n_records: usize,
    pub mean_response_claims: f64,
    pub mean_gt_claims: f64,
    pub mean_k: f64,
}

impl AggregateReport {
    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.means[metric.index()]
    }

    /// Number of records for which `metric` was defined.
    pub fn defined(&self, metric: Metric) -> usize {
        self.defined[metric.index()]
    }

    /// Mean response-claim count rounded for display.
    pub fn claim_display(&self) -> u64 {
        self.mean_response_claims.round() as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (Metric, Option<f64>)> + '_ {
        Metric::ALL.into_iter().map(|m| (m, self.mean(m)))
    }
}

/// Per-query arithmetic mean of each metric over the records where it is defined.
pub fn aggregate(records: &[MetricsRecord]) -> Result<AggregateReport, ModelError> {
    if records.is_empty() {
        return Err(ModelError::EmptyAggregate);
    }
    let mut sums = [0.0f64; 11];
    let mut defined = [0usize; 11];
    for r in records {
        for (i, v) in r.values.iter().enumerate() {
            if let Some(v) = v {
                sums[i] += v;
                defined[i] += 1;
            }
        }
    }
    let mut means = [None; 11];
    for i in 0..11 {
        means[i] = ratio_f(sums[i], defined[i]);
    }
    let n = records.len() as f64;
    let mean_of = |f: fn(&MetricsRecord) -> usize| records.iter().map(f).sum::<usize>() as f64 / n;
    Ok(AggregateReport {
        means,
        defined,
        n_records: records.len(),
        mean_response_claims: mean_of(|r| r.n_response_claims),
        mean_gt_claims: mean_of(|r| r.n_gt_claims),
        mean_k: mean_of(|r| r.k),
    })
}

fn ratio_f(sum: f64, n: usize) -> Option<f64> {
    (n > 0).then(|| sum / n as f64)
}
