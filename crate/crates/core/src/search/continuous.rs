//! Exact solver for the continuous part of a leaf.
//!
//! With the categorical levels fixed, the problem is
//!
//! ```text
//! minimize   sum_j w_j |d_j|
//! subject to y_lo <= s0 + sum_j a_j d_j <= y_hi,   min_j <= x_j + d_j <= max_j
//! ```
//!
//! Moving feature `j` buys score at price `w_j / |a_j|` per unit, up to its
//! bound, so buying from the cheapest seller first is optimal (fractional
//! knapsack). Only one side of the score interval can be violated at a time.

use alloc::vec::Vec;

pub(super) struct ContinuousVar {
    pub feature: usize,
    /// Raw-unit coefficient; never zero.
    pub coef: f64,
    pub weight: f64,
    pub origin: f64,
    pub min: f64,
    pub max: f64,
}

impl ContinuousVar {
    /// Room to move in direction `d` (+1 / -1) starting from `from`, and the
    /// bound reached when using all of it.
    fn room(&self, d: f64, from: f64) -> (f64, f64) {
        if d > 0.0 {
            ((self.max - from).max(0.0), self.max)
        } else {
            ((from - self.min).max(0.0), self.min)
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Solution {
    /// New value of every variable, in solver order.
    values: Vec<f64>,
    pub cost: f64,
    changed: u64,
}

impl Solution {
    /// Bit `i` set when variable `i` (solver order) moved.
    pub fn changed_mask(&self) -> u64 {
        self.changed
    }
}

pub(super) struct Greedy {
    /// Sorted by `|coef| / weight` descending, ties by schema order.
    vars: Vec<ContinuousVar>,
    y_lo: f64,
    y_hi: f64,
}

fn in_mask(mask: u64, i: usize) -> bool {
    if i >= 64 {
        mask == u64::MAX
    } else {
        mask & (1 << i) != 0
    }
}

impl Greedy {
    pub fn new(mut vars: Vec<ContinuousVar>, y_lo: f64, y_hi: f64) -> Self {
        vars.sort_by(|a, b| {
            let ra = a.coef.abs() / a.weight;
            let rb = b.coef.abs() / b.weight;
            rb.total_cmp(&ra).then(a.feature.cmp(&b.feature))
        });
        Self { vars, y_lo, y_hi }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn full_mask(&self) -> u64 {
        if self.vars.len() >= 64 {
            u64::MAX
        } else {
            (1u64 << self.vars.len()) - 1
        }
    }

    /// Score gap to close and its sign, for a score known to lie in `range`.
    fn gap(&self, (lo, hi): (f64, f64)) -> (f64, f64) {
        if hi < self.y_lo {
            (self.y_lo - hi, 1.0)
        } else if lo > self.y_hi {
            (lo - self.y_hi, -1.0)
        } else {
            (0.0, 1.0)
        }
    }

    /// Minimal continuous cost when the leaf score can be anywhere in
    /// `range` for free; `None` when no move within bounds closes the gap.
    pub fn lower_bound(&self, range: (f64, f64)) -> Option<f64> {
        let (mut need, dir) = self.gap(range);
        let mut cost = 0.0;
        for v in &self.vars {
            if need <= 0.0 {
                break;
            }
            let (room, _) = v.room(dir * v.coef.signum(), v.origin);
            let gain = v.coef.abs() * room;
            let take = gain.min(need);
            cost += take * v.weight / v.coef.abs();
            need -= take;
        }
        (need <= 0.0).then_some(cost)
    }

    /// Cheapest continuous move using only variables in `mask` that brings
    /// `score` into the interval and costs at least `min_cost`.
    pub fn solve(&self, score: f64, mask: u64, min_cost: f64) -> Option<Solution> {
        let mut values: Vec<f64> = self.vars.iter().map(|v| v.origin).collect();
        let (mut need, dir) = self.gap((score, score));
        for (i, v) in self.vars.iter().enumerate() {
            if need <= 0.0 {
                break;
            }
            if !in_mask(mask, i) {
                continue;
            }
            let d = dir * v.coef.signum();
            let (room, bound) = v.room(d, v.origin);
            let gain = v.coef.abs() * room;
            if gain <= 0.0 {
                continue;
            }
            if gain <= need {
                values[i] = bound;
                need -= gain;
            } else {
                values[i] = (v.origin + d * need / v.coef.abs()).clamp(v.min, v.max);
                need = 0.0;
            }
        }
        if need > 0.0 {
            return None;
        }

        let mut cost = self.cost_of(&values);
        if cost < min_cost {
            let target = min_cost * (1.0 + 1e-6);
            let moved = self.score_of(score, &values);
            self.pad(&mut values, mask, target - cost, moved)?;
            cost = self.cost_of(&values);
        }

        let changed = values
            .iter()
            .zip(&self.vars)
            .enumerate()
            .filter(|(_, (x, v))| **x != v.origin)
            .fold(0u64, |m, (i, _)| if i < 64 { m | (1 << i) } else { m });
        Some(Solution {
            values,
            cost,
            changed,
        })
    }

    /// Spends `extra` more cost on moves that keep the score inside the
    /// interval. Needed only when the score constraint is met by a move
    /// cheaper than the minimum distance.
    fn pad(&self, values: &mut [f64], mask: u64, mut extra: f64, mut score: f64) -> Option<()> {
        for (i, v) in self.vars.iter().enumerate() {
            if extra <= 0.0 {
                break;
            }
            if !in_mask(mask, i) {
                continue;
            }
            let moved = values[i] - v.origin;
            let up_room = (self.y_hi - score).max(0.0);
            let down_room = (score - self.y_lo).max(0.0);
            let preferred = if up_room >= down_room { 1.0 } else { -1.0 } * v.coef.signum();
            let directions = if moved > 0.0 {
                [1.0, 0.0]
            } else if moved < 0.0 {
                [-1.0, 0.0]
            } else {
                [preferred, -preferred]
            };
            for d in directions {
                if d == 0.0 {
                    continue;
                }
                let (room, _) = v.room(d, values[i]);
                let effect = v.coef * d;
                let headroom = if effect > 0.0 { up_room } else { down_room };
                let cap = (room * v.weight).min(headroom / v.coef.abs() * v.weight);
                let take = cap.min(extra);
                if take <= 0.0 {
                    continue;
                }
                let step = take / v.weight;
                values[i] = (values[i] + d * step).clamp(v.min, v.max);
                score += effect * step;
                extra -= take;
                break;
            }
        }
        (extra <= 0.0).then_some(())
    }

    fn cost_of(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.vars)
            .map(|(x, v)| v.weight * (x - v.origin).abs())
            .sum()
    }

    fn score_of(&self, score: f64, values: &[f64]) -> f64 {
        score
            + values
                .iter()
                .zip(&self.vars)
                .map(|(x, v)| v.coef * (x - v.origin))
                .sum::<f64>()
    }

    /// `(feature index, new value)` for every variable.
    pub fn assignments<'a>(
        &'a self,
        solution: &'a Solution,
    ) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.vars
            .iter()
            .zip(&solution.values)
            .map(|(v, &x)| (v.feature, x))
    }
}
