//! Individual conditional expectation of the confidence score.
//!
//! One feature of a fixed instance is swept over a grid (every level of a
//! categorical feature, or `min, min + t, .., max` for a continuous one)
//! while all other features keep their values.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LogisticModel;
use crate::tabular::{FeatureKind, FeatureSchema, Instance, NamedValue, Value};

/// Upper limit on the number of points of a continuous grid.
pub const MAX_GRID_POINTS: usize = 100_001;

/// Continuous sweep `min, min + step, ..` up to and including `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    /// The schema range in 100 equal steps.
    pub fn default_for(min: f64, max: f64) -> Self {
        Self {
            min,
            max,
            step: (max - min) / 100.0,
        }
    }

    /// Grid values in ascending order. The last regular point is snapped to
    /// `max` when within rounding of it; otherwise `max` is appended.
    pub fn values(&self) -> Result<Vec<f64>> {
        let Self { min, max, step } = *self;
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidGrid(format!(
                "need finite min < max, got [{min}, {max}]"
            )));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step {step} must be positive")));
        }
        let range = max - min;
        let steps = libm::floor(range / step + 1e-9);
        if steps + 2.0 > MAX_GRID_POINTS as f64 {
            return Err(Error::InvalidGrid(format!(
                "step {step} gives more than {MAX_GRID_POINTS} points"
            )));
        }
        let steps = steps as usize;
        let mut values: Vec<f64> = (0..=steps).map(|i| min + i as f64 * step).collect();
        let last = values.last_mut().expect("at least one point");
        if (*last - max).abs() <= 1e-9 * range || *last > max {
            *last = max;
        } else {
            values.push(max);
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcePoint {
    pub value: NamedValue,
    pub probability: f64,
    pub confidence: f64,
    /// Whether the predicted class equals the original instance's.
    pub same_class: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Categorical,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IceCurve {
    pub feature: String,
    pub kind: CurveKind,
    pub points: Vec<IcePoint>,
    /// Predicted class of the original instance.
    pub prediction_class: String,
    /// Point holding the original value, if the grid contains it.
    pub origin_index: Option<usize>,
}

impl IceCurve {
    /// Index of the highest-confidence point; ties go to the first.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, p) in self.points.iter().enumerate() {
            if best.is_none_or(|b| p.confidence > self.points[b].confidence) {
                best = Some(i);
            }
        }
        best
    }
}

/// Sweeps `feature` of `instance`. `grid` applies to continuous features only
/// and defaults to the schema bounds in 100 steps; it must stay within them.
pub fn ice_curve(
    model: &LogisticModel,
    schema: &FeatureSchema,
    instance: &Instance,
    feature: &str,
    grid: Option<GridSpec>,
) -> Result<IceCurve> {
    model.check_schema(schema)?;
    instance.validate(schema)?;
    let index = schema
        .index_of(feature)
        .ok_or_else(|| Error::UnknownFeature(feature.into()))?;
    let spec = schema.feature(index);
    let original = model.predict(instance, schema)?;

    let (kind, grid_values): (CurveKind, Vec<Value>) = match &spec.kind {
        FeatureKind::Categorical { levels } => {
            if grid.is_some() {
                return Err(Error::InvalidGrid(format!(
                    "`{feature}` is categorical; its grid is the level set"
                )));
            }
            (
                CurveKind::Categorical,
                (0..levels.len()).map(Value::Level).collect(),
            )
        }
        FeatureKind::Continuous { min, max } => {
            let grid = grid.unwrap_or(GridSpec::default_for(*min, *max));
            if grid.min < *min || grid.max > *max {
                return Err(Error::InvalidGrid(format!(
                    "grid [{}, {}] leaves the bounds [{min}, {max}] of `{feature}`",
                    grid.min, grid.max
                )));
            }
            (
                CurveKind::Continuous,
                grid.values()?.into_iter().map(Value::Real).collect(),
            )
        }
    };

    let origin_value = instance.get(index);
    let mut origin_index = None;
    let mut points = Vec::with_capacity(grid_values.len());
    for (i, value) in grid_values.into_iter().enumerate() {
        if value == origin_value && origin_index.is_none() {
            origin_index = Some(i);
        }
        let swept = instance.with_value(schema, index, value)?;
        let p = model.predict(&swept, schema)?;
        points.push(IcePoint {
            value: spec.name_value(value),
            probability: p.probability,
            confidence: p.confidence,
            same_class: p.class == original.class,
        });
    }

    Ok(IceCurve {
        feature: spec.name.clone(),
        kind,
        points,
        prediction_class: original.predicted_class,
        origin_index,
    })
}

/// One default-grid curve per name, in order; duplicates are kept.
pub fn ice_batch(
    model: &LogisticModel,
    schema: &FeatureSchema,
    instance: &Instance,
    features: &[&str],
) -> Result<Vec<IceCurve>> {
    features
        .iter()
        .map(|f| ice_curve(model, schema, instance, f, None))
        .collect()
}
