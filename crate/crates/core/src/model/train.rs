use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassLabels, ColumnScaling, LogisticModel};
use crate::error::{Error, Result};
use crate::math::sigmoid;
use crate::tabular::{encode, FeatureKind, FeatureSchema, Instance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Initial step size; halved whenever a step would increase the loss.
    pub learning_rate: f64,
    /// L2 penalty on the coefficients (the bias is not penalized).
    pub l2: f64,
    pub max_epochs: usize,
    /// Stop once an epoch improves the loss by less than this.
    pub tolerance: f64,
    pub seed: u64,
    pub decision_boundary: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            l2: 1e-3,
            max_epochs: 2000,
            tolerance: 1e-9,
            seed: 42,
            decision_boundary: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Loss before training followed by the loss after every epoch.
    pub losses: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
}

/// Mean negative log-likelihood plus `l2/2 * |w|^2` over a dense design
/// matrix. Parameter layout: `[bias, w_0, .., w_{d-1}]`.
#[derive(Debug, Clone)]
pub struct Objective {
    rows: Vec<f64>,
    width: usize,
    targets: Vec<f64>,
    l2: f64,
}

impl Objective {
    pub fn new(rows: Vec<f64>, width: usize, targets: Vec<f64>, l2: f64) -> Self {
        assert_eq!(rows.len(), width * targets.len());
        Self {
            rows,
            width,
            targets,
            l2,
        }
    }

    pub fn n_params(&self) -> usize {
        self.width + 1
    }

    fn scores<'a>(&'a self, params: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        let (bias, w) = (params[0], &params[1..]);
        self.rows
            .chunks_exact(self.width)
            .map(move |row| bias + row.iter().zip(w).map(|(x, c)| x * c).sum::<f64>())
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let n = self.targets.len() as f64;
        let nll: f64 = self
            .scores(params)
            .zip(&self.targets)
            .map(|(z, &t)| softplus(z) - t * z)
            .sum();
        let penalty: f64 = params[1..].iter().map(|w| w * w).sum();
        nll / n + 0.5 * self.l2 * penalty
    }

    pub fn loss_and_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let n = self.targets.len() as f64;
        let mut grad = vec![0.0; self.n_params()];
        let mut nll = 0.0;
        for ((z, &t), row) in self
            .scores(params)
            .zip(&self.targets)
            .zip(self.rows.chunks_exact(self.width))
        {
            nll += softplus(z) - t * z;
            let residual = sigmoid(z) - t;
            grad[0] += residual;
            for (g, x) in grad[1..].iter_mut().zip(row) {
                *g += residual * x;
            }
        }
        let mut penalty = 0.0;
        for (g, w) in grad.iter_mut().zip(params).skip(1) {
            *g = *g / n + self.l2 * w;
            penalty += w * w;
        }
        grad[0] /= n;
        (nll / n + 0.5 * self.l2 * penalty, grad)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-z.abs()))
}

pub fn train(
    data: &[Instance],
    labels: &[bool],
    schema: &FeatureSchema,
    class_labels: ClassLabels,
    config: &TrainConfig,
) -> Result<LogisticModel> {
    train_with_report(data, labels, schema, class_labels, config).map(|(m, _)| m)
}

/// Full-batch gradient descent with step halving, so the recorded loss never
/// increases from one epoch to the next.
pub fn train_with_report(
    data: &[Instance],
    labels: &[bool],
    schema: &FeatureSchema,
    class_labels: ClassLabels,
    config: &TrainConfig,
) -> Result<(LogisticModel, TrainReport)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.len() != labels.len() {
        return Err(Error::LabelCount {
            instances: data.len(),
            labels: labels.len(),
        });
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::SingleClass);
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "learning rate {} must be positive",
            config.learning_rate
        )));
    }
    if !(config.l2 >= 0.0 && config.l2.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "l2 penalty {} must be >= 0",
            config.l2
        )));
    }

    let width = schema.encoded_width();
    let mut rows = Vec::with_capacity(width * data.len());
    for (r, instance) in data.iter().enumerate() {
        instance.validate(schema)?;
        let encoded = encode(instance, schema);
        if let Some(c) = encoded.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: r, column: c });
        }
        rows.extend_from_slice(encoded.as_slice());
    }

    let scaling = fit_scaling(&rows, width, schema);
    for row in rows.chunks_exact_mut(width) {
        for (x, s) in row.iter_mut().zip(&scaling) {
            *x = (*x - s.mean) / s.std;
        }
    }
    let targets = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
    let objective = Objective::new(rows, width, targets, config.l2);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params: Vec<f64> = (0..objective.n_params())
        .map(|_| rng.random_range(-0.01..0.01))
        .collect();

    let mut step = config.learning_rate;
    let (mut loss, mut grad) = objective.loss_and_gradient(&params);
    let mut losses = vec![loss];
    let mut converged = false;
    let mut epochs = 0;
    let mut candidate = vec![0.0; params.len()];
    while epochs < config.max_epochs {
        let mut accepted = None;
        for _ in 0..60 {
            for ((c, p), g) in candidate.iter_mut().zip(&params).zip(&grad) {
                *c = p - step * g;
            }
            let next = objective.loss(&candidate);
            if next <= loss {
                accepted = Some(next);
                break;
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            converged = true;
            break;
        };
        epochs += 1;
        core::mem::swap(&mut params, &mut candidate);
        let improvement = loss - next;
        losses.push(next);
        (loss, grad) = objective.loss_and_gradient(&params);
        if improvement < config.tolerance {
            converged = true;
            break;
        }
    }

    let model = LogisticModel::with_scaling(
        params[0],
        params[1..].to_vec(),
        scaling,
        class_labels,
        config.decision_boundary,
    )?;
    Ok((
        model,
        TrainReport {
            losses,
            epochs,
            converged,
        },
    ))
}

/// Zero-mean, unit-variance scaling for continuous columns; one-hot
/// columns are left untouched.
fn fit_scaling(rows: &[f64], width: usize, schema: &FeatureSchema) -> Vec<ColumnScaling> {
    let mut scaling = vec![ColumnScaling::IDENTITY; width];
    let n = (rows.len() / width) as f64;
    for (i, spec) in schema.features().iter().enumerate() {
        if let FeatureKind::Continuous { .. } = spec.kind {
            let col = schema.column_offset(i);
            let values = rows.iter().skip(col).step_by(width);
            let mean = values.clone().sum::<f64>() / n;
            let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let std = libm::sqrt(var);
            scaling[col] = ColumnScaling {
                mean,
                std: if std > 1e-12 { std } else { 1.0 },
            };
        }
    }
    scaling
}

/// Seeded shuffle of `0..n` split into `(train, test)` index lists.
pub fn holdout_split(n: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = libm::round(n as f64 * test_fraction.clamp(0.0, 1.0)) as usize;
    let test = idx.split_off(n - n_test);
    (idx, test)
}
