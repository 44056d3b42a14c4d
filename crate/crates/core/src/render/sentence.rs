use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{change_values, format_number};
use crate::search::{Counterfactual, CounterfactualQuery, Direction};

/// One-sentence description of `cf`, e.g.
///
/// ```text
/// One way you could have got a confidence score of less than 0.5 (0.44)
/// instead is if Marital Status had taken value Married rather than
/// Divorced/Widowed.
/// ```
///
/// Several changes are joined with "and", in schema order.
pub fn render_sentence(query: &CounterfactualQuery, cf: &Counterfactual) -> String {
    let relation = match query.direction {
        Direction::Raise => "more than",
        Direction::Lower => "less than",
    };
    let mut changed = Vec::with_capacity(cf.changes.len());
    let mut originals = Vec::with_capacity(cf.changes.len());
    for c in &cf.changes {
        let (from, to) = change_values(&c.from, &c.to);
        changed.push(format!("{} had taken value {to}", c.feature));
        originals.push(from);
    }
    format!(
        "One way you could have got a confidence score of {relation} {} ({:.2}) instead is if {} rather than {}.",
        format_number(query.threshold),
        cf.confidence,
        changed.join(" and "),
        originals.join(" and "),
    )
}
