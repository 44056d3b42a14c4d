//! Feature schema, instances and the mixed (one-hot + raw) encoding.

mod encode;
mod weights;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::render::format_number;

pub use encode::{decode, encode, EncodedVector};
pub use weights::{mad_weights, weighted_l1, DistanceWeights, MAD_EPSILON};

/// What values a feature takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Categorical { levels: Vec<String> },
    Continuous { min: f64, max: f64 },
}

fn default_mutable() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
    /// Immutable features are never changed by the counterfactual search.
    #[serde(default = "default_mutable")]
    pub mutable: bool,
    /// Replaces the MAD weight (continuous) or the flip cost (categorical).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

impl FeatureSpec {
    pub fn categorical<I, S>(name: &str, levels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            name: name.into(),
            kind: FeatureKind::Categorical {
                levels: levels.into_iter().map(Into::into).collect(),
            },
            mutable: true,
            weight: None,
        }
    }

    pub fn continuous(name: &str, min: f64, max: f64) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Continuous { min, max },
            mutable: true,
            weight: None,
        }
    }

    pub fn immutable(mut self) -> Self {
        self.mutable = false;
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, FeatureKind::Categorical { .. })
    }

    /// Number of encoded columns this feature occupies.
    pub fn width(&self) -> usize {
        match &self.kind {
            FeatureKind::Categorical { levels } => levels.len(),
            FeatureKind::Continuous { .. } => 1,
        }
    }

    pub fn levels(&self) -> &[String] {
        match &self.kind {
            FeatureKind::Categorical { levels } => levels,
            FeatureKind::Continuous { .. } => &[],
        }
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self.kind {
            FeatureKind::Continuous { min, max } => Some((min, max)),
            FeatureKind::Categorical { .. } => None,
        }
    }

    pub fn level_index(&self, level: &str) -> Option<usize> {
        self.levels().iter().position(|l| l == level)
    }

    /// Checks that `value` is admissible for this feature.
    pub fn check(&self, value: Value) -> Result<()> {
        let bad = |reason: String| Error::InvalidValue {
            feature: self.name.clone(),
            reason,
        };
        match (&self.kind, value) {
            (FeatureKind::Categorical { levels }, Value::Level(i)) if i < levels.len() => Ok(()),
            (FeatureKind::Categorical { levels }, Value::Level(i)) => Err(bad(format!(
                "level index {i} out of range for {} levels",
                levels.len()
            ))),
            (FeatureKind::Continuous { min, max }, Value::Real(v)) => {
                if !v.is_finite() {
                    Err(bad(format!("{v} is not finite")))
                } else if v < *min || v > *max {
                    Err(bad(format!("{v} outside [{min}, {max}]")))
                } else {
                    Ok(())
                }
            }
            (FeatureKind::Categorical { .. }, Value::Real(_)) => {
                Err(bad("expected a categorical level".into()))
            }
            (FeatureKind::Continuous { .. }, Value::Level(_)) => {
                Err(bad("expected a real number".into()))
            }
        }
    }

    /// Resolves a wire value (level name or number) against this feature.
    pub fn resolve(&self, value: &NamedValue) -> Result<Value> {
        let bad = |reason: String| Error::InvalidValue {
            feature: self.name.clone(),
            reason,
        };
        let resolved = match (&self.kind, value) {
            (FeatureKind::Categorical { .. }, NamedValue::Text(s)) => Value::Level(
                self.level_index(s)
                    .ok_or_else(|| bad(format!("unknown level `{s}`")))?,
            ),
            (FeatureKind::Categorical { .. }, NamedValue::Number(v)) => {
                let text = v.to_string();
                Value::Level(
                    self.level_index(&text)
                        .ok_or_else(|| bad(format!("unknown level `{text}`")))?,
                )
            }
            (FeatureKind::Continuous { .. }, NamedValue::Number(v)) => Value::Real(*v),
            (FeatureKind::Continuous { .. }, NamedValue::Text(s)) => Value::Real(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("`{s}` is not a number")))?,
            ),
        };
        self.check(resolved)?;
        Ok(resolved)
    }

    /// The wire form of `value`. Assumes `value` passed [`FeatureSpec::check`].
    pub fn name_value(&self, value: Value) -> NamedValue {
        match value {
            Value::Level(i) => NamedValue::Text(self.levels()[i].clone()),
            Value::Real(v) => NamedValue::Number(v),
        }
    }
}

/// Ordered, validated list of features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
    offsets: Vec<usize>,
    width: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    features: Vec<FeatureSpec>,
}

impl TryFrom<RawSchema> for FeatureSchema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        Self::new(raw.features)
    }
}

impl From<FeatureSchema> for RawSchema {
    fn from(schema: FeatureSchema) -> Self {
        RawSchema {
            features: schema.features,
        }
    }
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for f in &features {
            if f.name.trim().is_empty() {
                return Err(Error::InvalidSchema(
                    "feature names must be nonempty".into(),
                ));
            }
            if !names.insert(f.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate feature name `{}`",
                    f.name
                )));
            }
            match &f.kind {
                FeatureKind::Categorical { levels } => {
                    if levels.is_empty() {
                        return Err(Error::InvalidSchema(format!(
                            "categorical feature `{}` has no levels",
                            f.name
                        )));
                    }
                    let mut seen = BTreeSet::new();
                    for l in levels {
                        if !seen.insert(l.as_str()) {
                            return Err(Error::InvalidSchema(format!(
                                "feature `{}` repeats level `{l}`",
                                f.name
                            )));
                        }
                    }
                }
                FeatureKind::Continuous { min, max } => {
                    if !(min.is_finite() && max.is_finite() && min < max) {
                        return Err(Error::InvalidSchema(format!(
                            "feature `{}` needs finite bounds with min < max, got [{min}, {max}]",
                            f.name
                        )));
                    }
                }
            }
            if let Some(w) = f.weight {
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidSchema(format!(
                        "feature `{}` has non-positive weight {w}",
                        f.name
                    )));
                }
            }
        }

        let mut offsets = Vec::with_capacity(features.len());
        let mut width = 0;
        for f in &features {
            offsets.push(width);
            width += f.width();
        }
        Ok(Self {
            features,
            offsets,
            width,
        })
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature(&self, index: usize) -> &FeatureSpec {
        &self.features[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Total number of encoded columns.
    pub fn encoded_width(&self) -> usize {
        self.width
    }

    /// First encoded column of feature `index`.
    pub fn column_offset(&self, index: usize) -> usize {
        self.offsets[index]
    }

    /// Human-readable column names (`feature=level` for one-hot columns).
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width);
        for f in &self.features {
            match &f.kind {
                FeatureKind::Categorical { levels } => {
                    names.extend(levels.iter().map(|l| format!("{}={l}", f.name)))
                }
                FeatureKind::Continuous { .. } => names.push(f.name.clone()),
            }
        }
        names
    }
}

/// Value of one feature: a level index or a raw real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Level(usize),
    Real(f64),
}

impl Value {
    pub fn as_real(self) -> Option<f64> {
        match self {
            Value::Real(v) => Some(v),
            Value::Level(_) => None,
        }
    }

    pub fn as_level(self) -> Option<usize> {
        match self {
            Value::Level(i) => Some(i),
            Value::Real(_) => None,
        }
    }
}

/// Self-describing value: a level name or a number. Used at API boundaries
/// and in rendered output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NamedValue {
    Number(f64),
    Text(String),
}

impl NamedValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            NamedValue::Number(v) => Some(*v),
            NamedValue::Text(_) => None,
        }
    }
}

impl fmt::Display for NamedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedValue::Number(v) => f.write_str(&format_number(*v)),
            NamedValue::Text(s) => f.write_str(s),
        }
    }
}

/// One value per schema feature, positionally aligned and validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instance {
    values: Vec<Value>,
}

impl Instance {
    pub fn new(schema: &FeatureSchema, values: Vec<Value>) -> Result<Self> {
        let instance = Self { values };
        instance.validate(schema)?;
        Ok(instance)
    }

    /// Builds an instance from `(feature name, value)` pairs; every schema
    /// feature must appear exactly once.
    pub fn from_named<'a, I>(schema: &FeatureSchema, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a NamedValue)>,
    {
        let mut values: Vec<Option<Value>> = alloc::vec![None; schema.len()];
        for (name, value) in pairs {
            let index = schema
                .index_of(name)
                .ok_or_else(|| Error::UnknownFeature(name.into()))?;
            if values[index].is_some() {
                return Err(Error::InvalidValue {
                    feature: name.into(),
                    reason: "given more than once".into(),
                });
            }
            values[index] = Some(schema.feature(index).resolve(value)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingFeature(schema.feature(i).name.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn validate(&self, schema: &FeatureSchema) -> Result<()> {
        if self.values.len() != schema.len() {
            return Err(Error::InstanceLength {
                expected: schema.len(),
                found: self.values.len(),
            });
        }
        for (spec, &value) in schema.features().iter().zip(&self.values) {
            spec.check(value)?;
        }
        Ok(())
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> Value {
        self.values[index]
    }

    /// Copy with feature `index` replaced; checked against `schema`.
    pub fn with_value(&self, schema: &FeatureSchema, index: usize, value: Value) -> Result<Self> {
        schema.feature(index).check(value)?;
        let mut values = self.values.clone();
        values[index] = value;
        Ok(Self { values })
    }

    pub fn to_named(&self, schema: &FeatureSchema) -> Vec<(String, NamedValue)> {
        schema
            .features()
            .iter()
            .zip(&self.values)
            .map(|(f, &v)| (f.name.clone(), f.name_value(v)))
            .collect()
    }

    pub(crate) fn from_values_unchecked(values: Vec<Value>) -> Self {
        Self { values }
    }
}
