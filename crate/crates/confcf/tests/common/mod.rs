#![allow(dead_code)]

use std::path::PathBuf;

use confcf::config::LabelConfig;
use confcf::persist::ModelFile;
use confcf_core::{DistanceWeights, FeatureSchema, FeatureSpec, LogisticModel};

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(path: &str) -> PathBuf {
    workspace_root().join("fixtures").join(path)
}

fn label() -> LabelConfig {
    LabelConfig {
        column: "y".into(),
        negative: "0".into(),
        positive: "1".into(),
        negative_display: Some("negative".into()),
        positive_display: Some("positive".into()),
    }
}

fn build(features: Vec<FeatureSpec>, bias: f64, coefficients: Vec<f64>) -> ModelFile {
    let schema = FeatureSchema::new(features).unwrap();
    let l = label();
    let model = LogisticModel::new(bias, coefficients, l.class_labels(), 0.5).unwrap();
    let weights = DistanceWeights::uniform(&schema);
    ModelFile::new(schema, l, weights, model, None).unwrap()
}

/// P = sigmoid(x) with x in [0, 10].
pub fn single_feature() -> ModelFile {
    build(
        vec![FeatureSpec::continuous("x", 0.0, 10.0)],
        0.0,
        vec![1.0],
    )
}

/// Every coefficient zero, so P = 0.5 everywhere.
pub fn all_zero() -> ModelFile {
    build(
        vec![
            FeatureSpec::categorical("colour", ["red", "green", "blue"]),
            FeatureSpec::continuous("x", 0.0, 10.0),
        ],
        0.0,
        vec![0.0; 4],
    )
}

/// A 3-level categorical, a zero-coefficient continuous feature and a
/// live continuous feature.
pub fn mixed() -> ModelFile {
    build(
        vec![
            FeatureSpec::categorical(
                "Marital Status",
                ["Married", "Never Married", "Divorced/Widowed"],
            ),
            FeatureSpec::continuous("Hours", 0.0, 10.0),
            FeatureSpec::continuous("Age", 0.0, 10.0),
        ],
        -0.5,
        vec![0.8, -1.2, 0.1, 0.0, 0.3],
    )
}

/// Divorced/Widowed gives P = 0.1, Married gives P = 0.28.
pub fn marital() -> ModelFile {
    let logit = |p: f64| (p / (1.0 - p)).ln();
    build(
        vec![FeatureSpec::categorical(
            "Marital Status",
            ["Married", "Never Married", "Divorced/Widowed"],
        )],
        0.0,
        vec![logit(0.28), -5.0, logit(0.1)],
    )
}

type Builder = fn() -> ModelFile;

pub const FIXTURE_MODELS: [(&str, Builder); 4] = [
    ("single_feature.json", single_feature),
    ("all_zero.json", all_zero),
    ("mixed.json", mixed),
    ("marital.json", marital),
];
