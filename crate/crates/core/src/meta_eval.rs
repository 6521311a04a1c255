//! Meta-evaluation: how well metric score differences track human pairwise preferences.
//!
//! Human labels use the integer scale -2..=2, where -2 means response A is
//! significantly better and +2 means response B is significantly better. The
//! textual choices map as: "A significantly better" = -2, "A slightly better" = -1,
//! "tie" = 0, "B slightly better" = 1, "B significantly better" = 2.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::MetaEvalError;
use crate::metrics::Metric;

pub const LABEL_RANGE: std::ops::RangeInclusive<i32> = -2..=2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aspect {
    Correctness,
    Completeness,
    Overall,
}

impl Aspect {
    pub const ALL: [Aspect; 3] = [Aspect::Correctness, Aspect::Completeness, Aspect::Overall];

    pub fn name(self) -> &'static str {
        match self {
            Aspect::Correctness => "correctness",
            Aspect::Completeness => "completeness",
            Aspect::Overall => "overall",
        }
    }

    /// The metric that measures the same thing the human judged.
    pub fn default_metric(self) -> Metric {
        match self {
            Aspect::Correctness => Metric::Precision,
            Aspect::Completeness => Metric::Recall,
            Aspect::Overall => Metric::F1,
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Aspect {
    type Err = MetaEvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Aspect::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| MetaEvalError::UnknownAspect(s.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AspectLabels {
    #[serde(default)]
    pub correctness: Vec<i32>,
    #[serde(default)]
    pub completeness: Vec<i32>,
    #[serde(default)]
    pub overall: Vec<i32>,
}

impl AspectLabels {
    pub fn get(&self, aspect: Aspect) -> &[i32] {
        match aspect {
            Aspect::Correctness => &self.correctness,
            Aspect::Completeness => &self.completeness,
            Aspect::Overall => &self.overall,
        }
    }
}

/// Two responses to one query, with per-annotator labels and per-metric scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub pair_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_b: Option<String>,
    #[serde(default)]
    pub scores_a: BTreeMap<String, f64>,
    #[serde(default)]
    pub scores_b: BTreeMap<String, f64>,
    #[serde(default)]
    pub labels: AspectLabels,
}

impl PreferencePair {
    /// Mean annotator label for `aspect`, if any labels exist and all are in range.
    pub fn human_score(&self, aspect: Aspect) -> Result<Option<f64>, MetaEvalError> {
        let labels = self.labels.get(aspect);
        if let Some(bad) = labels.iter().find(|l| !LABEL_RANGE.contains(l)) {
            return Err(MetaEvalError::LabelOutOfRange {
                pair_id: self.pair_id.clone(),
                label: *bad,
            });
        }
        if labels.is_empty() {
            return Ok(None);
        }
        Ok(Some(
            labels.iter().map(|l| *l as f64).sum::<f64>() / labels.len() as f64,
        ))
    }

    /// Raw score difference B - A for `metric`.
    pub fn score_diff(&self, metric: &str) -> Option<f64> {
        Some(self.scores_b.get(metric)? - self.scores_a.get(metric)?)
    }
}

/// Scales differences by `2 / max |d|` so the largest magnitude lands on ±2.
pub fn normalize_diffs(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    if max == 0.0 {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|d| 2.0 * d / max).collect()
}

fn check_lengths(xs: &[f64], ys: &[f64]) -> Result<(), MetaEvalError> {
    if xs.len() != ys.len() {
        return Err(MetaEvalError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(MetaEvalError::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    Ok(())
}

/// Sample product-moment correlation; `None` when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Option<f64>, MetaEvalError> {
    check_lengths(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<f64>, MetaEvalError> {
    check_lengths(xs, ys)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Fraction of items where two annotators differ by at most one step.
pub fn agreement_rate(h: &[i32], h_prime: &[i32]) -> Result<f64, MetaEvalError> {
    if h.len() != h_prime.len() {
        return Err(MetaEvalError::LengthMismatch {
            left: h.len(),
            right: h_prime.len(),
        });
    }
    if h.is_empty() {
        return Err(MetaEvalError::TooFewSamples { needed: 1, got: 0 });
    }
    let agree = h
        .iter()
        .zip(h_prime)
        .filter(|(a, b)| (*a - *b).abs() <= 1)
        .count();
    Ok(agree as f64 / h.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub pair_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricCorrelation {
    pub metric: String,
    pub aspect: Aspect,
    pub result: CorrelationResult,
    pub excluded: Vec<Exclusion>,
}

fn correlate(xs: &[f64], ys: &[f64]) -> CorrelationResult {
    let n = xs.len();
    if n < 2 {
        return CorrelationResult {
            pearson: None,
            spearman: None,
            n,
        };
    }
    CorrelationResult {
        pearson: pearson(xs, ys).expect("lengths checked"),
        spearman: spearman(xs, ys).expect("lengths checked"),
        n,
    }
}

/// Correlates normalized metric differences with mean human labels.
///
/// Pairs missing the metric on either side, or lacking labels for the aspect,
/// are excluded and listed. Normalization runs over the retained pairs only.
pub fn correlate_metric(
    pairs: &[PreferencePair],
    metric: &str,
    aspect: Aspect,
) -> Result<MetricCorrelation, MetaEvalError> {
    let mut human = Vec::new();
    let mut diffs = Vec::new();
    let mut excluded = Vec::new();
    for pair in pairs {
        let exclude = |reason: String| Exclusion {
            pair_id: pair.pair_id.clone(),
            reason,
        };
        let h = match pair.human_score(aspect) {
            Ok(Some(h)) => h,
            Ok(None) => {
                excluded.push(exclude(format!("no {aspect} labels")));
                continue;
            }
            Err(e) => {
                excluded.push(exclude(e.to_string()));
                continue;
            }
        };
        let Some(d) = pair.score_diff(metric) else {
            excluded.push(exclude(format!("missing {metric} score")));
            continue;
        };
        human.push(h);
        diffs.push(d);
    }
    if human.is_empty() {
        return Err(MetaEvalError::NoValidPairs {
            metric: metric.to_string(),
            aspect: aspect.to_string(),
        });
    }
    let normalized = normalize_diffs(&diffs);
    Ok(MetricCorrelation {
        metric: metric.to_string(),
        aspect,
        result: correlate(&human, &normalized),
        excluded,
    })
}

/// Agreement between the first two annotators on one aspect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnotatorAgreement {
    pub aspect: Aspect,
    pub agreement_rate: f64,
    pub correlation: CorrelationResult,
}

/// `None` when no pair has two labels for the aspect.
pub fn annotator_agreement(pairs: &[PreferencePair], aspect: Aspect) -> Option<AnnotatorAgreement> {
    let (h, h_prime): (Vec<i32>, Vec<i32>) = pairs
        .iter()
        .filter_map(|p| match p.labels.get(aspect) {
            [a, b, ..] => Some((*a, *b)),
            _ => None,
        })
        .unzip();
    let rate = agreement_rate(&h, &h_prime).ok()?;
    let to_f = |v: &[i32]| v.iter().map(|x| *x as f64).collect::<Vec<_>>();
    Some(AnnotatorAgreement {
        aspect,
        agreement_rate: rate,
        correlation: correlate(&to_f(&h), &to_f(&h_prime)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: Option<f64>, b: f64) -> bool {
        a.is_some_and(|a| (a - b).abs() < 1e-9)
    }

    #[test]
    fn normalize_scales_to_two() {
        assert_eq!(normalize_diffs(&[0.5, -1.0, 0.25]), vec![1.0, -2.0, 0.5]);
        assert_eq!(normalize_diffs(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(normalize_diffs(&[3.0]), vec![2.0]);
    }

    #[test]
    fn pearson_examples() {
        assert!(approx(pearson(&[1., 2., 3.], &[1., 2., 3.]).unwrap(), 1.0));
        assert!(approx(pearson(&[1., 2., 3.], &[3., 2., 1.]).unwrap(), -1.0));
        // cov = 3, var_x = var_y = 5
        assert!(approx(
            pearson(&[1., 2., 3., 4.], &[2., 1., 4., 3.]).unwrap(),
            0.6
        ));
    }

    #[test]
    fn pearson_zero_variance_is_absent() {
        assert_eq!(pearson(&[1., 1., 1.], &[1., 2., 3.]).unwrap(), None);
    }

    #[test]
    fn pearson_length_errors() {
        assert!(matches!(
            pearson(&[1., 2.], &[1.]),
            Err(MetaEvalError::LengthMismatch { .. })
        ));
        assert!(matches!(
            pearson(&[1.], &[1.]),
            Err(MetaEvalError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn spearman_with_ties() {
        assert_eq!(average_ranks(&[10., 10., 20.]), vec![1.5, 1.5, 3.0]);
        // cov = 1.5, var = 2 and 1.5 -> 1.5 / sqrt(3)
        let r = spearman(&[1., 2., 3.], &[10., 10., 20.]).unwrap();
        assert!(approx(r, 1.5 / 3f64.sqrt()));
        assert!(approx(r, 0.8660254037844386));
    }

    #[test]
    fn spearman_monotone() {
        assert!(approx(
            spearman(&[1., 5., 9.], &[0.1, 0.2, 100.]).unwrap(),
            1.0
        ));
        assert!(approx(
            spearman(&[1., 5., 9.], &[3., 2., -7.]).unwrap(),
            -1.0
        ));
    }

    #[test]
    fn agreement_examples() {
        assert_eq!(agreement_rate(&[1, -2, 0], &[1, -2, 0]).unwrap(), 1.0);
        assert_eq!(agreement_rate(&[2, 0], &[1, 2]).unwrap(), 0.5);
        assert_eq!(agreement_rate(&[-2], &[2]).unwrap(), 0.0);
        assert!(agreement_rate(&[1], &[1, 2]).is_err());
    }

    fn pair(id: &str, a: f64, b: f64, labels: Vec<i32>) -> PreferencePair {
        PreferencePair {
            pair_id: id.into(),
            query_id: None,
            response_a: None,
            response_b: None,
            scores_a: [("precision".to_string(), a)].into(),
            scores_b: [("precision".to_string(), b)].into(),
            labels: AspectLabels {
                correctness: labels,
                ..Default::default()
            },
        }
    }

    #[test]
    fn correlate_hand_fixture() {
        // d = [0.4, 0.1, -0.1, -0.4] -> e = [2, 0.5, -0.5, -2]; h = [2, 1, -1, -2]
        let pairs = vec![
            pair("p1", 0.1, 0.5, vec![2]),
            pair("p2", 0.5, 0.6, vec![1, 1]),
            pair("p3", 0.6, 0.5, vec![-1]),
            pair("p4", 0.9, 0.5, vec![-2]),
        ];
        let c = correlate_metric(&pairs, "precision", Aspect::Correctness).unwrap();
        // sum(h*e) = 9, sum(h^2) = 10, sum(e^2) = 8.5
        assert!(approx(c.result.pearson, 9.0 / 85f64.sqrt()));
        assert!(approx(c.result.spearman, 1.0));
        assert_eq!(c.result.n, 4);
        assert!(c.excluded.is_empty());
    }

    #[test]
    fn correlate_constant_metric_is_absent() {
        let pairs = vec![
            pair("p1", 0.5, 0.5, vec![2]),
            pair("p2", 0.3, 0.3, vec![-1]),
            pair("p3", 0.1, 0.1, vec![0]),
        ];
        let c = correlate_metric(&pairs, "precision", Aspect::Correctness).unwrap();
        assert_eq!(c.result.pearson, None);
        assert_eq!(c.result.spearman, None);
    }

    #[test]
    fn correlate_excludes_incomplete_pairs() {
        let mut missing = pair("p3", 0.0, 0.0, vec![1]);
        missing.scores_b.clear();
        let pairs = vec![
            pair("p1", 0.0, 1.0, vec![2]),
            pair("p2", 1.0, 0.0, vec![-2]),
            missing,
            pair("p4", 0.0, 1.0, vec![]),
            pair("p5", 0.0, 1.0, vec![7]),
        ];
        let c = correlate_metric(&pairs, "precision", Aspect::Correctness).unwrap();
        assert_eq!(c.result.n, 2);
        let ids: Vec<_> = c.excluded.iter().map(|e| e.pair_id.as_str()).collect();
        assert_eq!(ids, ["p3", "p4", "p5"]);
    }

    #[test]
    fn correlate_no_valid_pairs_errors() {
        let pairs = vec![pair("p1", 0.0, 1.0, vec![])];
        assert!(matches!(
            correlate_metric(&pairs, "precision", Aspect::Correctness),
            Err(MetaEvalError::NoValidPairs { .. })
        ));
    }

    #[test]
    fn annotator_agreement_uses_first_two_labels() {
        let pairs = vec![
            pair("a", 0., 0., vec![2, 1]),
            pair("b", 0., 0., vec![0, 2]),
            pair("c", 0., 0., vec![1]),
        ];
        let a = annotator_agreement(&pairs, Aspect::Correctness).unwrap();
        assert_eq!(a.agreement_rate, 0.5);
        assert_eq!(a.correlation.n, 2);
        assert!(annotator_agreement(&pairs, Aspect::Overall).is_none());
    }

    #[test]
    fn aspect_metric_mapping() {
        assert_eq!(Aspect::Correctness.default_metric(), Metric::Precision);
        assert_eq!(Aspect::Completeness.default_metric(), Metric::Recall);
        assert_eq!(Aspect::Overall.default_metric(), Metric::F1);
        assert_eq!("overall".parse::<Aspect>().unwrap(), Aspect::Overall);
    }
}
