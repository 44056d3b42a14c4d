//! Versioned JSON model files.
//!
//! A model file carries everything needed to serve explanations: the
//! schema, label configuration, distance weights and the fitted model. The
//! SHA-256 of the schema's JSON form is stored alongside so that a schema
//! passed separately on the command line can be checked against it.

use std::path::Path;

use confcf_core::{DistanceWeights, FeatureSchema, LogisticModel, TrainConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::LabelConfig;
use crate::error::{read_file, write_file, CliError, Result};

pub const FORMAT: &str = "confcf-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub config: TrainConfig,
    pub rows: usize,
    pub holdout_rows: usize,
    pub epochs: usize,
    pub converged: bool,
    pub final_loss: f64,
    /// Accuracy on the held-out rows, if any were held out.
    pub holdout_accuracy: Option<f64>,
    /// Share of the most frequent label among the held-out rows.
    pub holdout_majority_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub schema_hash: String,
    pub schema: FeatureSchema,
    pub label: LabelConfig,
    pub weights: DistanceWeights,
    pub model: LogisticModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingSummary>,
}

/// Hex SHA-256 of the schema's JSON serialization.
pub fn schema_hash(schema: &FeatureSchema) -> String {
    let json = serde_json::to_vec(schema).expect("schema serializes");
    hex::encode(Sha256::digest(&json))
}

impl ModelFile {
    pub fn new(
        schema: FeatureSchema,
        label: LabelConfig,
        weights: DistanceWeights,
        model: LogisticModel,
        training: Option<TrainingSummary>,
    ) -> Result<Self> {
        model.check_schema(&schema)?;
        weights.validate(&schema)?;
        Ok(Self {
            format: FORMAT.into(),
            version: VERSION,
            schema_hash: schema_hash(&schema),
            schema,
            label,
            weights,
            model,
            training,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self =
            serde_json::from_str(text).map_err(|e| CliError::ModelFile(e.to_string()))?;
        if file.format != FORMAT {
            return Err(CliError::ModelFile(format!(
                "unknown format `{}`",
                file.format
            )));
        }
        if file.version != VERSION {
            return Err(CliError::ModelFile(format!(
                "unsupported version {} (expected {VERSION})",
                file.version
            )));
        }
        if file.schema_hash != schema_hash(&file.schema) {
            return Err(CliError::ModelFile(
                "schema hash does not match the embedded schema".into(),
            ));
        }
        file.model.check_schema(&file.schema)?;
        file.weights.validate(&file.schema)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path)?).map_err(|e| e.in_file(path))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_json())
    }

    /// Fails unless `schema` is the schema the model was trained with.
    pub fn ensure_schema(&self, schema: &FeatureSchema) -> Result<()> {
        if schema_hash(schema) == self.schema_hash {
            return Ok(());
        }
        let ours = self.schema.features();
        let theirs = schema.features();
        let detail = ours
            .iter()
            .zip(theirs)
            .find(|(a, b)| a != b)
            .map(|(a, b)| format!("feature `{}` differs from `{}`", a.name, b.name))
            .unwrap_or_else(|| {
                format!(
                    "model has {} features, schema has {}",
                    ours.len(),
                    theirs.len()
                )
            });
        Err(CliError::SchemaMismatch(detail))
    }
}
