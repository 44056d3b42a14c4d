//! Schema files (TOML).
//!
//! ```toml
//! [label]
//! column = "income"
//! negative = "<=50K"
//! positive = ">50K"
//! negative_display = "Lower than $50,000"   # optional
//!
//! [training]                                # optional, see TrainConfig
//! seed = 7
//!
//! [[features]]
//! name = "Age"
//! kind = "continuous"
//! min = 17
//! max = 90
//! mutable = false
//!
//! [[features]]
//! name = "Marital Status"
//! kind = "categorical"
//! levels = ["Married", "Never Married", "Divorced/Widowed"]
//! ```

use std::path::Path;

use confcf_core::{ClassLabels, FeatureSchema, FeatureSpec, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// How the binary label is read from data files and shown to people.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelConfig {
    pub column: String,
    pub negative: String,
    pub positive: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_display: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_display: Option<String>,
}

impl LabelConfig {
    /// Class names used in predictions and rendered explanations.
    pub fn class_labels(&self) -> ClassLabels {
        ClassLabels::new(
            self.negative_display.as_deref().unwrap_or(&self.negative),
            self.positive_display.as_deref().unwrap_or(&self.positive),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    label: LabelConfig,
    #[serde(default)]
    training: TrainConfig,
    features: Vec<FeatureSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaConfig {
    pub label: LabelConfig,
    pub training: TrainConfig,
    pub schema: FeatureSchema,
}

impl SchemaConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if raw.label.negative == raw.label.positive {
            return Err(CliError::Config(
                "label.negative and label.positive must differ".into(),
            ));
        }
        if raw.features.iter().any(|f| f.name == raw.label.column) {
            return Err(CliError::Config(format!(
                "label column `{}` is also listed as a feature",
                raw.label.column
            )));
        }
        let schema = FeatureSchema::new(raw.features)?;
        Ok(Self {
            label: raw.label,
            training: raw.training,
            schema,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::error::read_file(path)?;
        Self::parse(&text).map_err(|e| e.in_file(path))
    }
}
