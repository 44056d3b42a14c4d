#![allow(dead_code)]

pub mod brute;

use confcf_core::{find_counterfactuals, verify, Error};

pub use brute::{random_problem, RandomProblem};

/// What one oracle comparison observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    BothInfeasible,
    Found {
        solver: f64,
        strict: Option<f64>,
        relaxed: f64,
    },
}

/// Solves `p` with the library and checks it against the brute-force
/// sandwich `relaxed <= solver <= strict` (each with 1e-6 slack).
pub fn compare_with_brute_force(p: &RandomProblem) -> Result<OracleOutcome, String> {
    let bf = p.brute_force();
    match find_counterfactuals(&p.model, &p.weights, &p.schema, &p.query) {
        Ok(found) => {
            let Some(first) = found.first() else {
                return Err("solver returned an empty list".into());
            };
            for (i, cf) in found.iter().enumerate() {
                if !verify(&p.model, &p.weights, &p.schema, &p.query, cf) {
                    return Err(format!("solution {i} fails verify: {cf:?}"));
                }
            }
            if found.windows(2).any(|w| w[0].cost > w[1].cost) {
                return Err("alternatives not sorted by cost".into());
            }
            let Some(relaxed) = bf.relaxed else {
                return Err(format!(
                    "solver found cost {} but the relaxed grid is empty",
                    first.cost
                ));
            };
            if first.cost < relaxed - 1e-6 {
                return Err(format!(
                    "solver cost {} below relaxed bound {relaxed}",
                    first.cost
                ));
            }
            if let Some(strict) = bf.strict {
                if first.cost > strict + 1e-6 {
                    return Err(format!(
                        "solver cost {} above grid optimum {strict}",
                        first.cost
                    ));
                }
            }
            Ok(OracleOutcome::Found {
                solver: first.cost,
                strict: bf.strict,
                relaxed,
            })
        }
        Err(Error::NoCounterfactual(reason)) => match bf.strict {
            Some(strict) => Err(format!(
                "solver reported {reason} but the grid has a solution of cost {strict}"
            )),
            None => Ok(OracleOutcome::BothInfeasible),
        },
        Err(e) => Err(format!("solver error: {e}")),
    }
}
