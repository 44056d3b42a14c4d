use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{FeatureKind, FeatureSchema, Instance, Value};
use crate::error::{Error, Result};
use crate::math::sorted_median;

/// Floor applied to a zero median absolute deviation before inversion.
pub const MAD_EPSILON: f64 = 1e-4;

/// Per-feature distance weights: the inverse-MAD weight of a continuous
/// feature, or the flat cost of changing a categorical feature's level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceWeights {
    per_feature: Vec<f64>,
}

impl DistanceWeights {
    pub fn new(schema: &FeatureSchema, per_feature: Vec<f64>) -> Result<Self> {
        let weights = Self { per_feature };
        weights.validate(schema)?;
        Ok(weights)
    }

    /// Weight 1 everywhere, honouring schema overrides.
    pub fn uniform(schema: &FeatureSchema) -> Self {
        Self {
            per_feature: schema
                .features()
                .iter()
                .map(|f| f.weight.unwrap_or(1.0))
                .collect(),
        }
    }

    pub fn validate(&self, schema: &FeatureSchema) -> Result<()> {
        if self.per_feature.len() != schema.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} features",
                self.per_feature.len(),
                schema.len()
            )));
        }
        if let Some((i, w)) = self
            .per_feature
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidWeights(format!(
                "weight {w} for `{}` is not positive and finite",
                schema.feature(i).name
            )));
        }
        Ok(())
    }

    pub fn get(&self, feature: usize) -> f64 {
        self.per_feature[feature]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.per_feature
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            per_feature: self.per_feature.iter().map(|w| w * factor).collect(),
        }
    }
}

/// Inverse median-absolute-deviation weights for continuous features and
/// unit flip costs for categorical ones; schema overrides win in both cases.
pub fn mad_weights(data: &[Instance], schema: &FeatureSchema) -> Result<DistanceWeights> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut per_feature = Vec::with_capacity(schema.len());
    let mut column = Vec::with_capacity(data.len());
    for (i, spec) in schema.features().iter().enumerate() {
        let weight = match (&spec.kind, spec.weight) {
            (_, Some(w)) => w,
            (FeatureKind::Categorical { .. }, None) => 1.0,
            (FeatureKind::Continuous { .. }, None) => {
                column.clear();
                for row in data {
                    match row.get(i) {
                        Value::Real(v) => column.push(v),
                        Value::Level(_) => {
                            return Err(Error::InvalidValue {
                                feature: spec.name.clone(),
                                reason: "expected a real number".into(),
                            })
                        }
                    }
                }
                1.0 / median_absolute_deviation(&mut column).max(MAD_EPSILON)
            }
        };
        per_feature.push(weight);
    }
    DistanceWeights::new(schema, per_feature)
}

/// `median(|v - median(v)|)`; reorders `values`.
fn median_absolute_deviation(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let median = sorted_median(values);
    for v in values.iter_mut() {
        *v = (*v - median).abs();
    }
    values.sort_by(f64::total_cmp);
    sorted_median(values)
}

/// Weighted L1 distance between two instances: `w_j |x_j - x'_j|` over
/// continuous features plus the flip cost of every changed categorical one.
pub fn weighted_l1(
    a: &Instance,
    b: &Instance,
    schema: &FeatureSchema,
    weights: &DistanceWeights,
) -> f64 {
    debug_assert_eq!(a.len(), schema.len());
    a.values()
        .iter()
        .zip(b.values())
        .enumerate()
        .map(|(i, (&x, &y))| match (x, y) {
            (Value::Real(x), Value::Real(y)) => weights.get(i) * (x - y).abs(),
            (x, y) if x == y => 0.0,
            _ => weights.get(i),
        })
        .sum()
}
