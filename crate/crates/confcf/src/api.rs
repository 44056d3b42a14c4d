//! Request and response documents shared by the HTTP service and the CLI.
//!
//! Field names here are part of the public API; `docs/api.md` describes
//! them. Every value in a response comes straight from a library call.

use std::collections::BTreeMap;

use confcf_core::search::probability_interval;
use confcf_core::{
    find_counterfactuals_until, ice_curve, render_sentence, ClassLabels, Counterfactual,
    CounterfactualQuery, Direction, Error, FeatureChange, FeatureSpec, GridSpec, IceCurve,
    Instance, NamedValue, Prediction, ProbabilityInterval,
};
use serde::{Deserialize, Serialize};

use crate::persist::ModelFile;

/// An instance keyed by feature name.
pub type InstanceDoc = BTreeMap<String, NamedValue>;

pub const DEADLINE_EXCEEDED: &str = "deadline_exceeded";

pub fn instance_from_doc(file: &ModelFile, doc: &InstanceDoc) -> Result<Instance, Error> {
    Instance::from_named(&file.schema, doc.iter().map(|(k, v)| (k.as_str(), v)))
}

pub fn instance_to_doc(file: &ModelFile, instance: &Instance) -> InstanceDoc {
    instance.to_named(&file.schema).into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: String,
    pub importance: f64,
}

/// `GET /model`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub features: Vec<FeatureSpec>,
    pub label_column: String,
    pub class_labels: ClassLabels,
    pub decision_boundary: f64,
    pub schema_hash: String,
    /// Per-feature distance weight (MAD-based or flip cost).
    pub distance_weights: BTreeMap<String, f64>,
    /// Features by decreasing spread of their standardized coefficients.
    pub feature_ranking: Vec<FeatureImportance>,
}

impl ModelInfo {
    pub fn new(file: &ModelFile) -> Result<Self, Error> {
        let ranking = file.model.rank_features(&file.schema)?;
        Ok(Self {
            features: file.schema.features().to_vec(),
            label_column: file.label.column.clone(),
            class_labels: file.model.class_labels().clone(),
            decision_boundary: file.model.decision_boundary(),
            schema_hash: file.schema_hash.clone(),
            distance_weights: file
                .schema
                .features()
                .iter()
                .zip(file.weights.as_slice())
                .map(|(f, &w)| (f.name.clone(), w))
                .collect(),
            feature_ranking: ranking
                .into_iter()
                .map(|(feature, importance)| FeatureImportance {
                    feature,
                    importance,
                })
                .collect(),
        })
    }
}

/// `POST /predict`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictRequest {
    pub instance: InstanceDoc,
}

pub fn predict(file: &ModelFile, request: &PredictRequest) -> Result<Prediction, Error> {
    let instance = instance_from_doc(file, &request.instance)?;
    file.model.predict(&instance, &file.schema)
}

/// `POST /counterfactuals`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterfactualsRequest {
    pub instance: InstanceDoc,
    pub direction: Direction,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternatives: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualDoc {
    pub instance: InstanceDoc,
    pub cost: f64,
    pub probability: f64,
    pub confidence: f64,
    pub predicted_class: String,
    pub changes: Vec<FeatureChange>,
    pub sentence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualsResponse {
    pub original: Prediction,
    /// Probabilities a counterfactual may take; absent when none qualify.
    pub interval: Option<ProbabilityInterval>,
    pub counterfactuals: Vec<CounterfactualDoc>,
    /// False when the deadline cut the search short.
    pub complete: bool,
    /// Why the list is empty or partial: `infeasible_interval`,
    /// `infeasible_within_bounds` or `deadline_exceeded`.
    pub reason: Option<String>,
}

/// The query a request describes.
pub fn query_from_request(
    file: &ModelFile,
    request: &CounterfactualsRequest,
) -> Result<CounterfactualQuery, Error> {
    let instance = instance_from_doc(file, &request.instance)?;
    let mut query = CounterfactualQuery::new(instance, request.direction, request.threshold);
    if let Some(n) = request.alternatives {
        query = query.with_alternatives(n);
    }
    query.validate(&file.schema)?;
    Ok(query)
}

/// Runs the search, polling `should_stop` between leaves. Infeasibility is
/// reported through `reason`, not as an error.
pub fn counterfactuals(
    file: &ModelFile,
    query: &CounterfactualQuery,
    should_stop: &mut dyn FnMut() -> bool,
) -> Result<(CounterfactualsResponse, Vec<Counterfactual>), Error> {
    let (model, schema) = (&file.model, &file.schema);
    let original = model.predict(&query.instance, schema)?;
    let interval = probability_interval(
        original.probability,
        model.decision_boundary(),
        query.direction,
        query.threshold,
        query.epsilon_strict,
    );
    let (found, complete, reason) =
        match find_counterfactuals_until(model, &file.weights, schema, query, should_stop) {
            Ok(outcome) => {
                let reason = (!outcome.complete).then(|| DEADLINE_EXCEEDED.to_string());
                (outcome.counterfactuals, outcome.complete, reason)
            }
            Err(Error::NoCounterfactual(r)) => (Vec::new(), true, Some(r.code().into())),
            Err(e) => return Err(e),
        };
    let docs = found
        .iter()
        .map(|cf| CounterfactualDoc {
            instance: instance_to_doc(file, &cf.instance),
            cost: cf.cost,
            probability: cf.probability,
            confidence: cf.confidence,
            predicted_class: cf.predicted_class.clone(),
            changes: cf.changes.clone(),
            sentence: render_sentence(query, cf),
        })
        .collect();
    Ok((
        CounterfactualsResponse {
            original,
            interval,
            counterfactuals: docs,
            complete,
            reason,
        },
        found,
    ))
}

/// `POST /ice`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IceRequest {
    pub instance: InstanceDoc,
    pub features: Vec<String>,
    /// Grids for continuous features; others use the schema bounds in 100 steps.
    #[serde(default)]
    pub grids: BTreeMap<String, GridSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IceResponse {
    pub curves: Vec<IceCurve>,
}

pub fn ice(file: &ModelFile, request: &IceRequest) -> Result<IceResponse, Error> {
    let instance = instance_from_doc(file, &request.instance)?;
    if let Some(name) = request.grids.keys().find(|k| !request.features.contains(k)) {
        return Err(Error::InvalidGrid(format!(
            "grid given for `{name}`, which is not swept"
        )));
    }
    let curves = request
        .features
        .iter()
        .map(|f| {
            ice_curve(
                &file.model,
                &file.schema,
                &instance,
                f,
                request.grids.get(f).copied(),
            )
        })
        .collect::<Result<_, _>>()?;
    Ok(IceResponse { curves })
}

/// Body of every 4xx response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    /// Offending field or feature, when one can be named.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

/// Kind of failure, used to pick the HTTP status and the `error` code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-range input (400).
    Invalid,
    /// The instance's feature set does not match the model's schema (409).
    SchemaMismatch,
    /// A bug or broken model file (500).
    Internal,
}

pub fn classify_error(error: &Error) -> (ErrorKind, ErrorBody) {
    let (kind, code, field) = match error {
        Error::UnknownFeature(name) => (ErrorKind::SchemaMismatch, "unknown_feature", Some(name)),
        Error::MissingFeature(name) => (ErrorKind::SchemaMismatch, "missing_feature", Some(name)),
        Error::InstanceLength { .. } | Error::WidthMismatch { .. } => {
            (ErrorKind::SchemaMismatch, "schema_mismatch", None)
        }
        Error::InvalidValue { feature, .. } => (ErrorKind::Invalid, "invalid_value", Some(feature)),
        Error::InvalidQuery(_) => (ErrorKind::Invalid, "invalid_query", None),
        Error::InvalidGrid(_) => (ErrorKind::Invalid, "invalid_grid", None),
        Error::ProbabilityOutOfRange(_) => (ErrorKind::Invalid, "invalid_value", None),
        _ => (ErrorKind::Internal, "internal", None),
    };
    (
        kind,
        ErrorBody {
            error: code.into(),
            message: error.to_string(),
            field: field.cloned(),
        },
    )
}
