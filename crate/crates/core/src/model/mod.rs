//! Binary logistic regression and the margin-of-confidence score.

mod train;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::sigmoid;
use crate::tabular::{encode, EncodedVector, FeatureKind, FeatureSchema, Instance};

pub use train::{holdout_split, train, train_with_report, Objective, TrainConfig, TrainReport};

/// Margin of confidence for a binary classifier: `|2P - 1|`.
///
/// Zero on the decision boundary `P = 0.5`, one at certainty.
pub fn confidence(probability: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&probability) {
        return Err(Error::ProbabilityOutOfRange(probability));
    }
    Ok((2.0 * probability - 1.0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassSide {
    Negative,
    Positive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabels {
    pub negative: String,
    pub positive: String,
}

impl ClassLabels {
    pub fn new(negative: impl Into<String>, positive: impl Into<String>) -> Self {
        Self {
            negative: negative.into(),
            positive: positive.into(),
        }
    }

    pub fn label(&self, side: ClassSide) -> &str {
        match side {
            ClassSide::Negative => &self.negative,
            ClassSide::Positive => &self.positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probability: f64,
    pub class: ClassSide,
    pub predicted_class: String,
    pub confidence: f64,
}

/// Affine map applied to an encoded column before the dot product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScaling {
    pub mean: f64,
    pub std: f64,
}

impl ColumnScaling {
    pub const IDENTITY: Self = Self {
        mean: 0.0,
        std: 1.0,
    };

    fn apply(self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }
}

/// Logistic model over the mixed encoding of a schema.
///
/// Coefficients act on standardized columns; [`LogisticModel::raw_affine`]
/// folds the standardization back into raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct LogisticModel {
    bias: f64,
    coefficients: Vec<f64>,
    scaling: Vec<ColumnScaling>,
    class_labels: ClassLabels,
    decision_boundary: f64,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    bias: f64,
    coefficients: Vec<f64>,
    standardization: Vec<ColumnScaling>,
    class_labels: ClassLabels,
    decision_boundary: f64,
}

impl TryFrom<RawModel> for LogisticModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        Self::with_scaling(
            raw.bias,
            raw.coefficients,
            raw.standardization,
            raw.class_labels,
            raw.decision_boundary,
        )
    }
}

impl From<LogisticModel> for RawModel {
    fn from(m: LogisticModel) -> Self {
        RawModel {
            bias: m.bias,
            coefficients: m.coefficients,
            standardization: m.scaling,
            class_labels: m.class_labels,
            decision_boundary: m.decision_boundary,
        }
    }
}

impl LogisticModel {
    /// A model acting directly on raw encoded columns.
    pub fn new(
        bias: f64,
        coefficients: Vec<f64>,
        class_labels: ClassLabels,
        decision_boundary: f64,
    ) -> Result<Self> {
        let scaling = vec![ColumnScaling::IDENTITY; coefficients.len()];
        Self::with_scaling(bias, coefficients, scaling, class_labels, decision_boundary)
    }

    pub fn with_scaling(
        bias: f64,
        coefficients: Vec<f64>,
        scaling: Vec<ColumnScaling>,
        class_labels: ClassLabels,
        decision_boundary: f64,
    ) -> Result<Self> {
        if !(decision_boundary > 0.0 && decision_boundary < 1.0) {
            return Err(Error::InvalidModel(format!(
                "decision boundary {decision_boundary} not inside (0, 1)"
            )));
        }
        if !bias.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel("non-finite parameter".into()));
        }
        if scaling.len() != coefficients.len() {
            return Err(Error::InvalidModel(format!(
                "{} scaling entries for {} coefficients",
                scaling.len(),
                coefficients.len()
            )));
        }
        if scaling
            .iter()
            .any(|s| !(s.mean.is_finite() && s.std.is_finite() && s.std > 0.0))
        {
            return Err(Error::InvalidModel(
                "standardization needs finite mean and std > 0".into(),
            ));
        }
        if class_labels.negative == class_labels.positive {
            return Err(Error::InvalidModel("class labels must differ".into()));
        }
        Ok(Self {
            bias,
            coefficients,
            scaling,
            class_labels,
            decision_boundary,
        })
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn scaling(&self) -> &[ColumnScaling] {
        &self.scaling
    }

    pub fn class_labels(&self) -> &ClassLabels {
        &self.class_labels
    }

    pub fn decision_boundary(&self) -> f64 {
        self.decision_boundary
    }

    pub fn width(&self) -> usize {
        self.coefficients.len()
    }

    /// Copy of the model with the sign of every parameter flipped.
    pub fn negated(&self) -> Self {
        Self {
            bias: -self.bias,
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            ..self.clone()
        }
    }

    pub fn check_schema(&self, schema: &FeatureSchema) -> Result<()> {
        if schema.encoded_width() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: schema.encoded_width(),
            });
        }
        Ok(())
    }

    /// The linear score `y = w.x + b` for an encoded vector.
    pub fn linear_score(&self, x: &EncodedVector) -> Result<f64> {
        if x.len() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: x.len(),
            });
        }
        Ok(self.score_unchecked(x.as_slice()))
    }

    fn score_unchecked(&self, x: &[f64]) -> f64 {
        self.bias
            + self
                .coefficients
                .iter()
                .zip(&self.scaling)
                .zip(x)
                .map(|((c, s), &v)| c * s.apply(v))
                .sum::<f64>()
    }

    /// `P(positive | x) = 1 / (1 + exp(-y))`.
    pub fn predict_proba(&self, x: &EncodedVector) -> Result<f64> {
        self.linear_score(x).map(sigmoid)
    }

    pub fn classify(&self, probability: f64) -> ClassSide {
        if probability >= self.decision_boundary {
            ClassSide::Positive
        } else {
            ClassSide::Negative
        }
    }

    /// Probability, class (ties at `D` go positive) and confidence.
    pub fn predict(&self, instance: &Instance, schema: &FeatureSchema) -> Result<Prediction> {
        self.check_schema(schema)?;
        instance.validate(schema)?;
        let probability = self.predict_proba(&encode(instance, schema))?;
        Ok(self.prediction_from_probability(probability))
    }

    pub(crate) fn prediction_from_probability(&self, probability: f64) -> Prediction {
        let class = self.classify(probability);
        Prediction {
            probability,
            class,
            predicted_class: self.class_labels.label(class).into(),
            confidence: (2.0 * probability - 1.0).abs(),
        }
    }

    /// Bias and per-column coefficients in raw (unstandardized) units.
    pub fn raw_affine(&self) -> (f64, Vec<f64>) {
        let mut bias = self.bias;
        let coefs = self
            .coefficients
            .iter()
            .zip(&self.scaling)
            .map(|(c, s)| {
                bias -= c * s.mean / s.std;
                c / s.std
            })
            .collect();
        (bias, coefs)
    }

    /// Features ranked by the spread of their standardized coefficients
    /// (absolute value for continuous, max - min over levels for categorical).
    pub fn rank_features(&self, schema: &FeatureSchema) -> Result<Vec<(String, f64)>> {
        self.check_schema(schema)?;
        let mut ranking: Vec<(String, f64)> = schema
            .features()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let start = schema.column_offset(i);
                let block = &self.coefficients[start..start + f.width()];
                let importance = match f.kind {
                    FeatureKind::Continuous { .. } => block[0].abs(),
                    FeatureKind::Categorical { .. } => {
                        let max = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let min = block.iter().copied().fold(f64::INFINITY, f64::min);
                        max - min
                    }
                };
                (f.name.clone(), importance)
            })
            .collect();
        ranking.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(ranking)
    }
}
