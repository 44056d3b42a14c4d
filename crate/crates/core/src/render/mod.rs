//! Text, table and SVG renderings of explanations.
//!
//! Numbers are rounded with Rust's float formatting, which rounds the exact
//! binary value half-to-even. Output is byte-deterministic for fixed input.

mod sentence;
mod svg;
mod table;

use alloc::format;
use alloc::string::{String, ToString};

use crate::tabular::NamedValue;

pub use sentence::render_sentence;
pub use svg::{render_plot, PlotStyle};
pub use table::{render_table, ExplanationTable};

/// `value` with at most 4 significant digits and no trailing zeros.
pub fn format_number(value: f64) -> String {
    format_significant(value, 4)
}

/// `from` and `to` formatted with the fewest significant digits (4 or more)
/// that tell them apart. Equal values format to 4 digits.
pub fn format_distinct(from: f64, to: f64) -> (String, String) {
    let mut digits = 4;
    loop {
        let pair = (
            format_significant(from, digits),
            format_significant(to, digits),
        );
        if pair.0 != pair.1 || digits >= 17 {
            return pair;
        }
        digits += 1;
    }
}

/// Display forms of a changed value, precise enough to differ.
pub(crate) fn change_values(from: &NamedValue, to: &NamedValue) -> (String, String) {
    match (from, to) {
        (NamedValue::Number(a), NamedValue::Number(b)) => format_distinct(*a, *b),
        _ => (from.to_string(), to.to_string()),
    }
}

fn format_significant(value: f64, digits: usize) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    if value == 0.0 {
        return "0".into();
    }
    let sci = format!("{value:.prec$e}", prec = digits - 1);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-6..15).contains(&exponent) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exponent}");
    }
    let rounded: f64 = sci.parse().expect("round trip");
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let fixed = format!("{rounded:.decimals$}");
    String::from(trim_zeros(&fixed))
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Confidence or probability as a percentage with one decimal.
pub fn format_percent(fraction: f64) -> String {
    format!("{:.1}%", fraction * 100.0)
}

pub(crate) fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}
