//! Exhaustive reference solver for small random counterfactual problems.
//!
//! Continuous features are restricted to a 50-point grid that contains the
//! origin value. The strict optimum over that grid is feasible for the real
//! solver, so it bounds the solver's cost from above. Rounding the solver's
//! continuous moves toward the origin stays on the grid, never raises the
//! cost, and shifts the score by at most one grid step per feature; the
//! optimum over grid points within that score slack of the feasible set
//! bounds the solver's cost from below.
//!
//! The feasibility test is written against the confidence definition
//! directly (`U = |2 sigma(s) - 1|`, class `sigma(s) >= 1/2`) and does not
//! use the library's interval code.

use confcf_core::{
    ClassLabels, CounterfactualQuery, Direction, DistanceWeights, FeatureSchema, FeatureSpec,
    Instance, LogisticModel, Value,
};
use rand::Rng;

pub const GRID_POINTS: usize = 50;

#[derive(Debug, Clone)]
pub enum OracleFeature {
    Categorical {
        /// Score contribution per level.
        coefs: Vec<f64>,
        origin: usize,
    },
    Continuous {
        coef: f64,
        /// Grid values, ascending, containing `origin`.
        grid: Vec<f64>,
        origin: f64,
    },
}

#[derive(Debug, Clone)]
pub struct RandomProblem {
    pub schema: FeatureSchema,
    pub model: LogisticModel,
    pub weights: DistanceWeights,
    pub query: CounterfactualQuery,
    pub bias: f64,
    pub features: Vec<OracleFeature>,
    pub mutable: Vec<bool>,
    pub weight: Vec<f64>,
}

/// A problem with at most 3 categorical features of at most 4 levels and at
/// most 2 continuous features; coefficients in [-3, 3]; D = 0.5.
pub fn random_problem(rng: &mut impl Rng) -> RandomProblem {
    let n_cat = rng.random_range(0..=3usize);
    let n_cont = if n_cat == 0 {
        rng.random_range(1..=2usize)
    } else {
        rng.random_range(0..=2usize)
    };
    let mut specs = Vec::new();
    let mut features = Vec::new();
    let mut columns = Vec::new();
    let mut mutable = Vec::new();
    let mut weight = Vec::new();
    let mut values = Vec::new();

    for c in 0..n_cat {
        let n_levels = rng.random_range(2..=4usize);
        let levels: Vec<String> = (0..n_levels).map(|l| format!("L{l}")).collect();
        let coefs: Vec<f64> = (0..n_levels)
            .map(|_| rng.random_range(-3.0..=3.0))
            .collect();
        let origin = rng.random_range(0..n_levels);
        let is_mutable = rng.random_bool(0.85);
        let mut spec = FeatureSpec::categorical(&format!("cat{c}"), levels);
        if !is_mutable {
            spec = spec.immutable();
        }
        specs.push(spec);
        columns.extend_from_slice(&coefs);
        mutable.push(is_mutable);
        weight.push(rng.random_range(0.2..=3.0));
        values.push(Value::Level(origin));
        features.push(OracleFeature::Categorical { coefs, origin });
    }
    for c in 0..n_cont {
        let lo = rng.random_range(-5.0..=5.0f64).round();
        let hi = lo + rng.random_range(1.0..=10.0f64).round();
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS)
            .map(|i| {
                if i == GRID_POINTS - 1 {
                    hi
                } else {
                    lo + i as f64 * step
                }
            })
            .collect();
        let origin = grid[rng.random_range(0..GRID_POINTS)];
        let coef = rng.random_range(-3.0..=3.0);
        let is_mutable = rng.random_bool(0.9);
        let mut spec = FeatureSpec::continuous(&format!("x{c}"), lo, hi);
        if !is_mutable {
            spec = spec.immutable();
        }
        specs.push(spec);
        columns.push(coef);
        mutable.push(is_mutable);
        weight.push(rng.random_range(0.2..=3.0));
        values.push(Value::Real(origin));
        features.push(OracleFeature::Continuous { coef, grid, origin });
    }

    let bias = rng.random_range(-3.0..=3.0);
    let schema = FeatureSchema::new(specs).unwrap();
    let model = LogisticModel::new(bias, columns, ClassLabels::new("neg", "pos"), 0.5).unwrap();
    let weights = DistanceWeights::new(&schema, weight.clone()).unwrap();
    let direction = if rng.random_bool(0.5) {
        Direction::Raise
    } else {
        Direction::Lower
    };
    // Mostly draw T so the origin does not already meet the target.
    let s0 = bias
        + features
            .iter()
            .map(|f| match f {
                OracleFeature::Categorical { coefs, origin } => coefs[*origin],
                OracleFeature::Continuous { coef, origin, .. } => coef * origin,
            })
            .sum::<f64>();
    let u0 = (2.0 * sigmoid(s0) - 1.0).abs().clamp(0.05, 0.95);
    let threshold = match direction {
        _ if rng.random_bool(0.2) => rng.random_range(0.05..=0.95),
        Direction::Raise => rng.random_range(u0..=0.95f64.max(u0)),
        Direction::Lower => rng.random_range(0.05f64.min(u0)..=u0),
    };
    let instance = Instance::new(&schema, values).unwrap();
    let query = CounterfactualQuery::new(instance, direction, threshold)
        .with_alternatives(rng.random_range(1..=3));
    RandomProblem {
        schema,
        model,
        weights,
        query,
        bias,
        features,
        mutable,
        weight,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    /// Cheapest grid point meeting every constraint exactly.
    pub strict: Option<f64>,
    /// Cheapest grid point whose score is within `slack` of a feasible score.
    pub relaxed: Option<f64>,
    /// One grid step of every mutable continuous feature, in score units.
    pub slack: f64,
}

fn sigmoid(s: f64) -> f64 {
    1.0 / (1.0 + (-s).exp())
}

impl RandomProblem {
    fn origin_score(&self) -> f64 {
        self.bias
            + self
                .features
                .iter()
                .map(|f| match f {
                    OracleFeature::Categorical { coefs, origin } => coefs[*origin],
                    OracleFeature::Continuous { coef, origin, .. } => coef * origin,
                })
                .sum::<f64>()
    }

    /// Candidate (score delta, cost) moves per feature.
    fn options(&self) -> Vec<Vec<(f64, f64)>> {
        self.features
            .iter()
            .zip(&self.mutable)
            .zip(&self.weight)
            .map(|((f, &mutable), &w)| match f {
                _ if !mutable => vec![(0.0, 0.0)],
                OracleFeature::Categorical { coefs, origin } => coefs
                    .iter()
                    .enumerate()
                    .map(|(l, c)| (c - coefs[*origin], if l == *origin { 0.0 } else { w }))
                    .collect(),
                OracleFeature::Continuous { coef, grid, origin } => grid
                    .iter()
                    .map(|v| (coef * (v - origin), w * (v - origin).abs()))
                    .collect(),
            })
            .collect()
    }

    pub fn brute_force(&self) -> BruteForce {
        let q = &self.query;
        let eps = q.epsilon_strict;
        let s0 = self.origin_score();
        let positive = sigmoid(s0) >= 0.5;
        // |s| at which U = T: U = |2 sigma(s) - 1| = tanh(|s| / 2).
        let cut = 2.0 * q.threshold.atanh();
        let slack: f64 = self
            .features
            .iter()
            .zip(&self.mutable)
            .map(|(f, &m)| match f {
                OracleFeature::Continuous { coef, grid, .. } if m => {
                    coef.abs() * (grid[1] - grid[0])
                }
                _ => 0.0,
            })
            .sum();

        let strict_ok = |s: f64, cost: f64| {
            let p = sigmoid(s);
            let u = (2.0 * p - 1.0).abs();
            let same = (p >= 0.5) == positive;
            let side = match q.direction {
                Direction::Raise => u >= q.threshold + 2.0 * eps,
                Direction::Lower => u <= q.threshold - 2.0 * eps,
            };
            same && side && cost >= q.min_distance
        };
        // Feasible scores (closed): one interval on the origin's side.
        let (lo, hi) = match (q.direction, positive) {
            (Direction::Raise, true) => (cut, f64::INFINITY),
            (Direction::Raise, false) => (f64::NEG_INFINITY, -cut),
            (Direction::Lower, true) => (0.0, cut),
            (Direction::Lower, false) => (-cut, 0.0),
        };
        let relaxed_ok = |s: f64| s >= lo - slack && s <= hi + slack;

        let options = self.options();
        let mut strict: Option<f64> = None;
        let mut relaxed: Option<f64> = None;
        let mut idx = vec![0usize; options.len()];
        loop {
            let (mut ds, mut cost) = (0.0, 0.0);
            for (opts, &i) in options.iter().zip(&idx) {
                ds += opts[i].0;
                cost += opts[i].1;
            }
            let s = s0 + ds;
            if strict_ok(s, cost) && strict.is_none_or(|b| cost < b) {
                strict = Some(cost);
            }
            if relaxed_ok(s) && relaxed.is_none_or(|b| cost < b) {
                relaxed = Some(cost);
            }
            // Odometer increment.
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return BruteForce {
                        strict,
                        relaxed,
                        slack,
                    };
                }
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}
