use confcf_core::model::{holdout_split, train_with_report};
use confcf_core::{mad_weights, Error, TrainConfig};

use crate::config::SchemaConfig;
use crate::dataset::Dataset;
use crate::error::{CliError, Result};
use crate::persist::{ModelFile, TrainingSummary};

/// Fits a model and its MAD distance weights on `data`, holding out
/// `holdout` of the rows (seeded by `config.seed`) for evaluation.
pub fn train_model(
    schema_config: &SchemaConfig,
    data: &Dataset,
    config: &TrainConfig,
    holdout: f64,
) -> Result<ModelFile> {
    if !(0.0..1.0).contains(&holdout) {
        return Err(CliError::Usage(format!(
            "holdout fraction {holdout} not in [0, 1)"
        )));
    }
    let label = &schema_config.label;
    if data.is_empty() {
        return Err(CliError::Data("dataset has no rows".into()));
    }
    if data.labels.iter().all(|&l| l == data.labels[0]) {
        let value = if data.labels[0] {
            &label.positive
        } else {
            &label.negative
        };
        return Err(CliError::SingleClass {
            column: label.column.clone(),
            value: value.clone(),
        });
    }

    let (train_idx, test_idx) = holdout_split(data.len(), holdout, config.seed);
    let train = data.subset(&train_idx);
    let test = data.subset(&test_idx);
    let schema = &schema_config.schema;

    let weights = mad_weights(&train.instances, schema)?;
    let (model, report) = train_with_report(
        &train.instances,
        &train.labels,
        schema,
        label.class_labels(),
        config,
    )
    .map_err(|e| match e {
        Error::SingleClass => CliError::SingleClass {
            column: label.column.clone(),
            value: format!("only one label in the {} training rows", train.len()),
        },
        e => e.into(),
    })?;

    let (holdout_accuracy, holdout_majority_rate) = if test.is_empty() {
        (None, None)
    } else {
        let mut correct = 0;
        for (x, &y) in test.instances.iter().zip(&test.labels) {
            let p = model.predict(x, schema)?;
            if (p.class == confcf_core::ClassSide::Positive) == y {
                correct += 1;
            }
        }
        let rate = test.positive_rate();
        (
            Some(correct as f64 / test.len() as f64),
            Some(rate.max(1.0 - rate)),
        )
    };

    let summary = TrainingSummary {
        config: config.clone(),
        rows: train.len(),
        holdout_rows: test.len(),
        epochs: report.epochs,
        converged: report.converged,
        final_loss: *report.losses.last().expect("initial loss recorded"),
        holdout_accuracy,
        holdout_majority_rate,
    };
    ModelFile::new(schema.clone(), label.clone(), weights, model, Some(summary))
}
