use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{matrix}: expected {expected} rows, found {found}")]
    RowCount {
        matrix: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{matrix}: row {row} has {found} columns, expected {expected}")]
    ColumnCount {
        matrix: &'static str,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("ground-truth answer has no claims")]
    NoGroundTruthClaims,
    #[error("claim text is empty after normalization")]
    EmptyClaim,
    #[error("duplicate {side:?} claim {text:?}")]
    DuplicateClaim {
        side: crate::ClaimSource,
        text: String,
    },
    #[error("claim {index} has source {found:?}, expected {expected:?}")]
    WrongSource {
        index: usize,
        expected: crate::ClaimSource,
        found: crate::ClaimSource,
    },
    #[error("cannot aggregate an empty list of metric records")]
    EmptyAggregate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetaEvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("no valid pairs for metric {metric:?} / aspect {aspect}")]
    NoValidPairs { metric: String, aspect: String },
    #[error("pair {pair_id}: label {label} outside -2..=2")]
    LabelOutOfRange { pair_id: String, label: i32 },
    #[error("unknown aspect {0:?}")]
    UnknownAspect(String),
}
