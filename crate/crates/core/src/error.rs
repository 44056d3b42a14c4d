use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Why a counterfactual search produced nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoCounterfactualReason {
    /// No probability satisfies both the threshold and the same-class rule.
    InfeasibleInterval,
    /// The interval is non-empty but unreachable within bounds and mutability.
    InfeasibleWithinBounds,
}

impl NoCounterfactualReason {
    pub fn code(self) -> &'static str {
        match self {
            Self::InfeasibleInterval => "infeasible_interval",
            Self::InfeasibleWithinBounds => "infeasible_within_bounds",
        }
    }
}

impl fmt::Display for NoCounterfactualReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("invalid value for feature `{feature}`: {reason}")]
    InvalidValue { feature: String, reason: String },
    #[error("instance has {found} values, schema has {expected} features")]
    InstanceLength { expected: usize, found: usize },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("missing value for feature `{0}`")]
    MissingFeature(String),
    #[error("encoded width {found} does not match model width {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("{instances} instances but {labels} labels")]
    LabelCount { instances: usize, labels: usize },
    #[error("training data contains a single class")]
    SingleClass,
    #[error("non-finite value in column {column} of row {row}")]
    NonFinite { row: usize, column: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid training settings: {0}")]
    InvalidConfig(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("no counterfactual: {0}")]
    NoCounterfactual(NoCounterfactualReason),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("curve has no points")]
    EmptyCurve,
    #[error("a table needs at least one alternative")]
    NoAlternatives,
    #[error("alternative {index} predicts `{found}`, original predicts `{expected}`")]
    ClassMismatch {
        index: usize,
        expected: String,
        found: String,
    },
}
