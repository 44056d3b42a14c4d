//! Labelled CSV datasets.
//!
//! The header must name every schema feature and the label column, each
//! exactly once; no other columns are allowed. Categorical cells hold level
//! names, continuous cells numbers within the schema bounds.

use std::io::Read;
use std::path::Path;

use confcf_core::{Instance, NamedValue};

use crate::config::SchemaConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub instances: Vec<Instance>,
    /// `true` for the positive label.
    pub labels: Vec<bool>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn positive_rate(&self) -> f64 {
        self.labels.iter().filter(|&&l| l).count() as f64 / self.len().max(1) as f64
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

pub fn load_dataset(reader: impl Read, config: &SchemaConfig) -> Result<Dataset> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header: {e}")))?
        .clone();

    let schema = &config.schema;
    let find = |name: &str| -> Result<usize> {
        let mut hits = header.iter().enumerate().filter(|(_, h)| *h == name);
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Ok(i),
            (None, _) => Err(CliError::Data(format!("header has no column `{name}`"))),
            (Some(_), Some(_)) => Err(CliError::Data(format!("header repeats column `{name}`"))),
        }
    };
    let feature_columns = schema
        .features()
        .iter()
        .map(|f| find(&f.name))
        .collect::<Result<Vec<_>>>()?;
    let label_column = find(&config.label.column)?;
    if header.len() != schema.len() + 1 {
        let extra: Vec<&str> = header
            .iter()
            .filter(|h| *h != config.label.column && schema.index_of(h).is_none())
            .collect();
        return Err(CliError::Data(format!(
            "unexpected columns: {}",
            extra.join(", ")
        )));
    }

    let mut instances = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Row {
            row,
            message: e.to_string(),
        })?;
        let mut values = Vec::with_capacity(schema.len());
        for (spec, &col) in schema.features().iter().zip(&feature_columns) {
            let named = NamedValue::Text(record[col].to_string());
            let value = spec.resolve(&named).map_err(|e| CliError::Row {
                row,
                message: e.to_string(),
            })?;
            values.push(value);
        }
        let instance = Instance::new(schema, values).map_err(|e| CliError::Row {
            row,
            message: e.to_string(),
        })?;
        let label = &record[label_column];
        let positive = if label == config.label.positive {
            true
        } else if label == config.label.negative {
            false
        } else {
            return Err(CliError::Row {
                row,
                message: format!(
                    "label `{label}` is neither `{}` nor `{}`",
                    config.label.negative, config.label.positive
                ),
            });
        };
        instances.push(instance);
        labels.push(positive);
    }
    Ok(Dataset { instances, labels })
}

pub fn load_dataset_file(path: &Path, config: &SchemaConfig) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_dataset(std::io::BufReader::new(file), config).map_err(|e| e.in_file(path))
}
