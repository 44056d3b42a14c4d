use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{FeatureKind, FeatureSchema, Instance, Value};
use crate::error::{Error, Result};

/// Mixed encoding: a one-hot block per categorical feature followed in
/// schema order by raw continuous values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EncodedVector(Vec<f64>);

impl EncodedVector {
    pub fn from_columns(columns: Vec<f64>) -> Self {
        Self(columns)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Encodes a valid instance. Column order: features in schema order,
/// categorical levels in declared order.
pub fn encode(instance: &Instance, schema: &FeatureSchema) -> EncodedVector {
    let mut columns = vec![0.0; schema.encoded_width()];
    encode_into(instance, schema, &mut columns);
    EncodedVector(columns)
}

pub(crate) fn encode_into(instance: &Instance, schema: &FeatureSchema, columns: &mut [f64]) {
    debug_assert_eq!(instance.len(), schema.len());
    for (i, &value) in instance.values().iter().enumerate() {
        let offset = schema.column_offset(i);
        match value {
            Value::Level(level) => {
                columns[offset..offset + schema.feature(i).width()].fill(0.0);
                columns[offset + level] = 1.0;
            }
            Value::Real(v) => columns[offset] = v,
        }
    }
}

/// Inverse of [`encode`]. Fails unless every categorical block is one-hot
/// and every continuous column is within bounds.
pub fn decode(encoded: &EncodedVector, schema: &FeatureSchema) -> Result<Instance> {
    if encoded.len() != schema.encoded_width() {
        return Err(Error::WidthMismatch {
            expected: schema.encoded_width(),
            found: encoded.len(),
        });
    }
    let cols = encoded.as_slice();
    let mut values = Vec::with_capacity(schema.len());
    for (i, spec) in schema.features().iter().enumerate() {
        let offset = schema.column_offset(i);
        match &spec.kind {
            FeatureKind::Categorical { levels } => {
                let block = &cols[offset..offset + levels.len()];
                let ones: Vec<usize> = block
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c == 1.0)
                    .map(|(j, _)| j)
                    .collect();
                let zeros = block.iter().filter(|&&c| c == 0.0).count();
                if ones.len() != 1 || zeros != levels.len() - 1 {
                    return Err(Error::InvalidValue {
                        feature: spec.name.clone(),
                        reason: format!("block {block:?} is not one-hot"),
                    });
                }
                values.push(Value::Level(ones[0]));
            }
            FeatureKind::Continuous { .. } => values.push(Value::Real(cols[offset])),
        }
    }
    Instance::new(schema, values)
}
