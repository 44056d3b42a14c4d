use serde::{Deserialize, Serialize};

use super::{CounterfactualQuery, Direction};
use crate::error::Result;
use crate::math::logit;
use crate::model::LogisticModel;
use crate::tabular::FeatureSchema;

/// Closed probability interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ProbabilityInterval {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    /// The matching interval of linear scores, `logit(lo) ..= logit(hi)`.
    pub fn to_scores(self) -> (f64, f64) {
        (logit(self.lo), logit(self.hi))
    }
}

/// Probabilities a counterfactual may take when the origin has probability
/// `origin`: the confidence must move past `threshold` by `epsilon` (in
/// probability units, so `2 * epsilon` in confidence units) in the requested
/// direction, and the probability must stay on the origin's side of the
/// decision boundary. `None` when no probability qualifies.
///
/// Raising confidence follows the branch of `|2P - 1|` that points away
/// from the boundary for the predicted class: upward for the positive class,
/// downward for the negative one.
pub fn probability_interval(
    origin: f64,
    boundary: f64,
    direction: Direction,
    threshold: f64,
    epsilon: f64,
) -> Option<ProbabilityInterval> {
    let upper_branch = (1.0 + threshold) / 2.0;
    let lower_branch = (1.0 - threshold) / 2.0;
    let positive = origin >= boundary;
    let (lo, hi) = match (direction, positive) {
        (Direction::Raise, true) => (boundary.max(upper_branch + epsilon), 1.0),
        (Direction::Raise, false) => (0.0, (boundary - epsilon).min(lower_branch - epsilon)),
        (Direction::Lower, true) => (boundary.max(lower_branch + epsilon), upper_branch - epsilon),
        (Direction::Lower, false) => (
            lower_branch + epsilon,
            (boundary - epsilon).min(upper_branch - epsilon),
        ),
    };
    let (lo, hi) = (lo.max(0.0), hi.min(1.0));
    (lo <= hi).then_some(ProbabilityInterval { lo, hi })
}

/// [`probability_interval`] for a query's origin under `model`.
pub fn required_probability_interval(
    model: &LogisticModel,
    schema: &FeatureSchema,
    query: &CounterfactualQuery,
) -> Result<Option<ProbabilityInterval>> {
    query.validate(schema)?;
    let origin = model.predict(&query.instance, schema)?;
    Ok(probability_interval(
        origin.probability,
        model.decision_boundary(),
        query.direction,
        query.threshold,
        query.epsilon_strict,
    ))
}
