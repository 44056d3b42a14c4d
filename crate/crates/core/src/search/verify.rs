use alloc::string::String;
use core::fmt;

use super::{changes_between, probability_interval, Counterfactual, CounterfactualQuery};
use crate::model::LogisticModel;
use crate::tabular::{weighted_l1, DistanceWeights, FeatureSchema};

/// The first postcondition a counterfactual breaks.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    InvalidInput(String),
    ImmutableChanged(String),
    EmptyInterval,
    OutsideInterval { probability: f64, lo: f64, hi: f64 },
    ClassChanged,
    TooClose { cost: f64, min_distance: f64 },
    CostMismatch { reported: f64, recomputed: f64 },
    ReportedPrediction,
    ChangeList,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidInput(e) => write!(f, "invalid input: {e}"),
            Self::ImmutableChanged(name) => write!(f, "immutable feature `{name}` changed"),
            Self::EmptyInterval => f.write_str("the query admits no probability"),
            Self::OutsideInterval {
                probability,
                lo,
                hi,
            } => {
                write!(f, "probability {probability} outside [{lo}, {hi}]")
            }
            Self::ClassChanged => f.write_str("predicted class changed"),
            Self::TooClose { cost, min_distance } => {
                write!(f, "cost {cost} below minimum distance {min_distance}")
            }
            Self::CostMismatch {
                reported,
                recomputed,
            } => {
                write!(f, "reported cost {reported}, recomputed {recomputed}")
            }
            Self::ReportedPrediction => f.write_str("reported probability/confidence/class stale"),
            Self::ChangeList => f.write_str("change list does not match the instances"),
        }
    }
}

/// Recomputes every search postcondition for `cf` from scratch.
pub fn check(
    model: &LogisticModel,
    weights: &DistanceWeights,
    schema: &FeatureSchema,
    query: &CounterfactualQuery,
    cf: &Counterfactual,
) -> Result<(), Violation> {
    let invalid = |e: crate::Error| Violation::InvalidInput(alloc::format!("{e}"));
    model.check_schema(schema).map_err(invalid)?;
    weights.validate(schema).map_err(invalid)?;
    query.validate(schema).map_err(invalid)?;
    cf.instance.validate(schema).map_err(invalid)?;

    let origin = &query.instance;
    for (i, spec) in schema.features().iter().enumerate() {
        if !spec.mutable && origin.get(i) != cf.instance.get(i) {
            return Err(Violation::ImmutableChanged(spec.name.clone()));
        }
    }

    let before = model.predict(origin, schema).map_err(invalid)?;
    let after = model.predict(&cf.instance, schema).map_err(invalid)?;
    let interval = probability_interval(
        before.probability,
        model.decision_boundary(),
        query.direction,
        query.threshold,
        query.epsilon_strict,
    )
    .ok_or(Violation::EmptyInterval)?;
    if !interval.contains(after.probability) {
        return Err(Violation::OutsideInterval {
            probability: after.probability,
            lo: interval.lo,
            hi: interval.hi,
        });
    }
    if after.class != before.class {
        return Err(Violation::ClassChanged);
    }

    let cost = weighted_l1(origin, &cf.instance, schema, weights);
    if cost < query.min_distance {
        return Err(Violation::TooClose {
            cost,
            min_distance: query.min_distance,
        });
    }
    if (cf.cost - cost).abs() > 1e-9 * cost.max(1.0) {
        return Err(Violation::CostMismatch {
            reported: cf.cost,
            recomputed: cost,
        });
    }
    if (cf.probability - after.probability).abs() > 1e-12
        || (cf.confidence - after.confidence).abs() > 1e-12
        || cf.predicted_class != after.predicted_class
    {
        return Err(Violation::ReportedPrediction);
    }
    if cf.changes != changes_between(origin, &cf.instance, schema) {
        return Err(Violation::ChangeList);
    }
    Ok(())
}

/// True iff `cf` satisfies every postcondition of the search.
pub fn verify(
    model: &LogisticModel,
    weights: &DistanceWeights,
    schema: &FeatureSchema,
    query: &CounterfactualQuery,
    cf: &Counterfactual,
) -> bool {
    check(model, weights, schema, query, cf).is_ok()
}
