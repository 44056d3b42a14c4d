//! Minimal-cost counterfactuals of the confidence score.
//!
//! A counterfactual `x'` for an origin `x` must
//!
//! 1. move the confidence `|2P - 1|` past the threshold `T` in the requested
//!    direction (by at least `epsilon_strict` in probability),
//! 2. keep `P(x')` on the same side of the decision boundary as `P(x)`, and
//! 3. differ from `x`, realized as `cost(x, x') >= min_distance`,
//!
//! while minimizing the weighted L1 cost. Mutable categorical features are
//! enumerated by branch-and-bound; for each categorical assignment the
//! continuous part is a fractional knapsack in score space, which the
//! greedy in [`continuous`] solves exactly.

mod continuous;
mod interval;
mod verify;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, NoCounterfactualReason, Result};
use crate::model::LogisticModel;
use crate::tabular::{
    encode, weighted_l1, DistanceWeights, FeatureKind, FeatureSchema, Instance, NamedValue, Value,
};
use continuous::{ContinuousVar, Greedy};

pub use interval::{probability_interval, required_probability_interval, ProbabilityInterval};
pub use verify::{check, verify, Violation};

/// Continuous features beyond this count are not enumerated as subsets when
/// looking for alternatives; only the unrestricted solution is used.
const MAX_SUBSET_FEATURES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Raise,
    Lower,
}

fn default_alternatives() -> usize {
    2
}

fn default_epsilon() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualQuery {
    pub instance: Instance,
    pub direction: Direction,
    /// Confidence threshold `T` in (0, 1].
    pub threshold: f64,
    #[serde(default = "default_alternatives")]
    pub alternatives: usize,
    /// Margin realizing the strict inequality on confidence, in probability units.
    #[serde(default = "default_epsilon")]
    pub epsilon_strict: f64,
    /// Smallest admissible cost, realizing `x' != x`.
    #[serde(default = "default_epsilon")]
    pub min_distance: f64,
}

impl CounterfactualQuery {
    pub fn new(instance: Instance, direction: Direction, threshold: f64) -> Self {
        Self {
            instance,
            direction,
            threshold,
            alternatives: default_alternatives(),
            epsilon_strict: default_epsilon(),
            min_distance: default_epsilon(),
        }
    }

    pub fn with_alternatives(mut self, alternatives: usize) -> Self {
        self.alternatives = alternatives;
        self
    }

    pub fn validate(&self, schema: &FeatureSchema) -> Result<()> {
        // T = 1 is allowed through: it is a legitimate query with an empty interval.
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidQuery(alloc::format!(
                "threshold {} not inside (0, 1]",
                self.threshold
            )));
        }
        if self.alternatives == 0 {
            return Err(Error::InvalidQuery(
                "alternatives must be at least 1".into(),
            ));
        }
        if !(self.epsilon_strict > 0.0 && self.epsilon_strict < 0.5) {
            return Err(Error::InvalidQuery(
                "epsilon_strict must be in (0, 0.5)".into(),
            ));
        }
        if !(self.min_distance > 0.0 && self.min_distance.is_finite()) {
            return Err(Error::InvalidQuery("min_distance must be positive".into()));
        }
        self.instance.validate(schema)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureChange {
    pub feature: String,
    pub index: usize,
    pub from: NamedValue,
    pub to: NamedValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterfactual {
    pub instance: Instance,
    /// Weighted L1 distance from the origin.
    pub cost: f64,
    pub probability: f64,
    pub confidence: f64,
    pub predicted_class: String,
    /// Features that differ from the origin, in schema order.
    pub changes: Vec<FeatureChange>,
}

impl Counterfactual {
    /// Describes `instance` as an alternative to `origin`, whether or not it
    /// satisfies any query.
    pub fn evaluate(
        model: &LogisticModel,
        weights: &DistanceWeights,
        schema: &FeatureSchema,
        origin: &Instance,
        instance: Instance,
    ) -> Result<Self> {
        origin.validate(schema)?;
        instance.validate(schema)?;
        weights.validate(schema)?;
        let prediction = model.predict(&instance, schema)?;
        Ok(Self {
            cost: weighted_l1(origin, &instance, schema, weights),
            probability: prediction.probability,
            confidence: prediction.confidence,
            predicted_class: prediction.predicted_class,
            changes: changes_between(origin, &instance, schema),
            instance,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub counterfactuals: Vec<Counterfactual>,
    /// False when the search was stopped before proving optimality.
    pub complete: bool,
}

/// Up to `query.alternatives` counterfactuals in ascending cost. The first is
/// cost-minimal; each later one is the cheapest whose categorical assignment
/// or set of changed continuous features differs from all earlier ones.
pub fn find_counterfactuals(
    model: &LogisticModel,
    weights: &DistanceWeights,
    schema: &FeatureSchema,
    query: &CounterfactualQuery,
) -> Result<Vec<Counterfactual>> {
    find_counterfactuals_until(model, weights, schema, query, &mut || false)
        .map(|outcome| outcome.counterfactuals)
}

/// Like [`find_counterfactuals`], but polls `should_stop` between leaves and
/// returns the best solutions found so far once it answers `true`.
pub fn find_counterfactuals_until(
    model: &LogisticModel,
    weights: &DistanceWeights,
    schema: &FeatureSchema,
    query: &CounterfactualQuery,
    should_stop: &mut dyn FnMut() -> bool,
) -> Result<SearchOutcome> {
    model.check_schema(schema)?;
    weights.validate(schema)?;
    query.validate(schema)?;

    let origin = model.predict(&query.instance, schema)?;
    let interval = probability_interval(
        origin.probability,
        model.decision_boundary(),
        query.direction,
        query.threshold,
        query.epsilon_strict,
    )
    .ok_or(Error::NoCounterfactual(
        NoCounterfactualReason::InfeasibleInterval,
    ))?;

    let Some(problem) = Problem::new(model, weights, schema, query, interval) else {
        return Err(Error::NoCounterfactual(
            NoCounterfactualReason::InfeasibleInterval,
        ));
    };
    let mut search = BranchAndBound {
        problem: &problem,
        best: Vec::new(),
        capacity: query.alternatives,
        levels: vec![0; problem.cats.len()],
        stopped: false,
        should_stop,
    };
    search.explore(0, 0.0, 0.0);
    let complete = !search.stopped;
    let best = search.best;

    let mut counterfactuals = Vec::with_capacity(best.len());
    for candidate in best {
        let cf = problem.materialize(candidate.values)?;
        if check(model, weights, schema, query, &cf).is_ok() {
            counterfactuals.push(cf);
        }
    }
    if counterfactuals.is_empty() && complete {
        return Err(Error::NoCounterfactual(
            NoCounterfactualReason::InfeasibleWithinBounds,
        ));
    }
    Ok(SearchOutcome {
        counterfactuals,
        complete,
    })
}

/// A mutable categorical feature as seen by the branch-and-bound.
struct CategoricalVar {
    feature: usize,
    /// Levels in exploration order: the origin's level first.
    order: Vec<usize>,
    /// Raw-unit score contribution of each level.
    contribution: Vec<f64>,
    origin_level: usize,
    flip_cost: f64,
}

struct Problem<'a> {
    model: &'a LogisticModel,
    schema: &'a FeatureSchema,
    weights: &'a DistanceWeights,
    query: &'a CounterfactualQuery,
    cats: Vec<CategoricalVar>,
    greedy: Greedy,
    /// Score with every mutable categorical feature contributing nothing and
    /// every continuous feature at its origin value.
    base_score: f64,
    /// Min / max achievable categorical contribution of `cats[depth..]`.
    suffix_min: Vec<f64>,
    suffix_max: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(
        model: &'a LogisticModel,
        weights: &'a DistanceWeights,
        schema: &'a FeatureSchema,
        query: &'a CounterfactualQuery,
        interval: ProbabilityInterval,
    ) -> Option<Self> {
        let (bias, coefs) = model.raw_affine();
        let (y_lo, y_hi) = shrink(interval.to_scores())?;

        let mut base_score = bias;
        let mut cats = Vec::new();
        let mut conts = Vec::new();
        for (i, spec) in schema.features().iter().enumerate() {
            let offset = schema.column_offset(i);
            match (&spec.kind, query.instance.get(i)) {
                (FeatureKind::Categorical { levels }, Value::Level(origin_level)) => {
                    let block = &coefs[offset..offset + levels.len()];
                    if spec.mutable && levels.len() > 1 {
                        let mut order = vec![origin_level];
                        order.extend((0..levels.len()).filter(|&l| l != origin_level));
                        cats.push(CategoricalVar {
                            feature: i,
                            order,
                            contribution: block.to_vec(),
                            origin_level,
                            flip_cost: weights.get(i),
                        });
                    } else {
                        base_score += block[origin_level];
                    }
                }
                (FeatureKind::Continuous { min, max }, Value::Real(x)) => {
                    let coef = coefs[offset];
                    base_score += coef * x;
                    if spec.mutable && coef != 0.0 {
                        conts.push(ContinuousVar {
                            feature: i,
                            coef,
                            weight: weights.get(i),
                            origin: x,
                            min: *min,
                            max: *max,
                        });
                    }
                }
                _ => unreachable!("instance validated against schema"),
            }
        }

        let mut suffix_min = vec![0.0; cats.len() + 1];
        let mut suffix_max = vec![0.0; cats.len() + 1];
        for d in (0..cats.len()).rev() {
            let c = &cats[d].contribution;
            suffix_min[d] = suffix_min[d + 1] + c.iter().copied().fold(f64::INFINITY, f64::min);
            suffix_max[d] = suffix_max[d + 1] + c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }

        Some(Self {
            model,
            schema,
            weights,
            query,
            cats,
            greedy: Greedy::new(conts, y_lo, y_hi),
            base_score,
            suffix_min,
            suffix_max,
        })
    }

    fn materialize(&self, values: Vec<Value>) -> Result<Counterfactual> {
        let instance = Instance::new(self.schema, values)?;
        Counterfactual::evaluate(
            self.model,
            self.weights,
            self.schema,
            &self.query.instance,
            instance,
        )
    }
}

/// Pulls finite score bounds inward by a relative 1e-10 so that rounding in
/// the standardized prediction path cannot push a solution outside.
fn shrink((lo, hi): (f64, f64)) -> Option<(f64, f64)> {
    let pad = |y: f64| 1e-10 * y.abs().max(1.0);
    let lo = if lo.is_finite() { lo + pad(lo) } else { lo };
    let hi = if hi.is_finite() { hi - pad(hi) } else { hi };
    (lo <= hi).then_some((lo, hi))
}

pub(crate) fn changes_between(
    origin: &Instance,
    other: &Instance,
    schema: &FeatureSchema,
) -> Vec<FeatureChange> {
    origin
        .values()
        .iter()
        .zip(other.values())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, (&a, &b))| {
            let spec = schema.feature(i);
            FeatureChange {
                feature: spec.name.clone(),
                index: i,
                from: spec.name_value(a),
                to: spec.name_value(b),
            }
        })
        .collect()
}

struct Candidate {
    cost: f64,
    encoded: Vec<f64>,
    values: Vec<Value>,
}

impl Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost.total_cmp(&other.cost).then_with(|| {
            self.encoded
                .iter()
                .zip(&other.encoded)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

struct BranchAndBound<'p, 's> {
    problem: &'p Problem<'p>,
    /// Best candidates so far, sorted, at most `capacity` long.
    best: Vec<Candidate>,
    capacity: usize,
    levels: Vec<usize>,
    stopped: bool,
    should_stop: &'s mut dyn FnMut() -> bool,
}

impl BranchAndBound<'_, '_> {
    fn incumbent(&self) -> f64 {
        if self.best.len() < self.capacity {
            f64::INFINITY
        } else {
            self.best[self.capacity - 1].cost
        }
    }

    /// `flip_cost` and `cat_score` cover `cats[..depth]`.
    fn explore(&mut self, depth: usize, flip_cost: f64, cat_score: f64) {
        if self.stopped {
            return;
        }
        let p = self.problem;
        let score = p.base_score + cat_score;
        let free = (score + p.suffix_min[depth], score + p.suffix_max[depth]);
        let Some(bound) = p.greedy.lower_bound(free) else {
            return;
        };
        if flip_cost + bound > self.incumbent() {
            return;
        }
        if depth == p.cats.len() {
            if (self.should_stop)() {
                self.stopped = true;
                return;
            }
            self.leaf(flip_cost, score);
            return;
        }
        let var = &p.cats[depth];
        for &level in &var.order {
            let extra = if level == var.origin_level {
                0.0
            } else {
                var.flip_cost
            };
            self.levels[depth] = level;
            self.explore(
                depth + 1,
                flip_cost + extra,
                cat_score + var.contribution[level],
            );
        }
    }

    fn leaf(&mut self, flip_cost: f64, score: f64) {
        let p = self.problem;
        let residual = (p.query.min_distance - flip_cost).max(0.0);
        let n = p.greedy.len();
        let full = p.greedy.full_mask();

        let unrestricted = p.greedy.solve(score, full, residual);
        let Some(first) = &unrestricted else {
            return;
        };
        if flip_cost + first.cost > self.incumbent() {
            return;
        }

        // Cheapest solution per set of changed continuous features.
        let mut per_key: Vec<(u64, continuous::Solution)> = Vec::new();
        let masks: Vec<u64> = if self.capacity == 1 || n > MAX_SUBSET_FEATURES {
            vec![full]
        } else {
            (0..=full).rev().collect()
        };
        for mask in masks {
            let solution = if mask == full {
                unrestricted.clone()
            } else {
                p.greedy.solve(score, mask, residual)
            };
            let Some(solution) = solution else { continue };
            let key = solution.changed_mask();
            match per_key.iter_mut().find(|(k, _)| *k == key) {
                Some((_, existing)) if existing.cost <= solution.cost => {}
                Some((_, existing)) => *existing = solution,
                None => per_key.push((key, solution)),
            }
        }

        for (_, solution) in per_key {
            let cost = flip_cost + solution.cost;
            if cost > self.incumbent() {
                continue;
            }
            let values = self.values_for(&solution);
            let instance = Instance::from_values_unchecked(values);
            let encoded = encode(&instance, p.schema).into_inner();
            self.offer(Candidate {
                cost,
                encoded,
                values: instance.values().to_vec(),
            });
        }
    }

    fn values_for(&self, solution: &continuous::Solution) -> Vec<Value> {
        let p = self.problem;
        let mut values = p.query.instance.values().to_vec();
        for (var, &level) in p.cats.iter().zip(&self.levels) {
            values[var.feature] = Value::Level(level);
        }
        for (feature, value) in p.greedy.assignments(solution) {
            values[feature] = Value::Real(value);
        }
        values
    }

    fn offer(&mut self, candidate: Candidate) {
        let pos = self
            .best
            .partition_point(|c| c.cmp(&candidate) == Ordering::Less);
        if pos >= self.capacity {
            return;
        }
        self.best.insert(pos, candidate);
        self.best.truncate(self.capacity);
    }
}
