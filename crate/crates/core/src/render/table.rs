use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{change_values, escape_xml, format_percent};
use crate::error::{Error, Result};
use crate::model::Prediction;
use crate::search::Counterfactual;
use crate::tabular::{FeatureSchema, Instance};

const UNCHANGED: &str = "-";

/// Alternatives side by side with the original instance.
///
/// Columns are `Attribute`, `Alternative 1..n`, `Original Value`. Rows are
/// the schema features, then the confidence score; the shared prediction
/// forms a footer spanning all value columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub confidence: Vec<String>,
    pub prediction: String,
}

pub fn render_table(
    schema: &FeatureSchema,
    original: &Instance,
    prediction: &Prediction,
    alternatives: &[Counterfactual],
) -> Result<ExplanationTable> {
    if alternatives.is_empty() {
        return Err(Error::NoAlternatives);
    }
    original.validate(schema)?;
    for (i, alt) in alternatives.iter().enumerate() {
        alt.instance.validate(schema)?;
        if alt.predicted_class != prediction.predicted_class {
            return Err(Error::ClassMismatch {
                index: i,
                expected: prediction.predicted_class.clone(),
                found: alt.predicted_class.clone(),
            });
        }
    }

    let mut header = vec![String::from("Attribute")];
    header.extend((1..=alternatives.len()).map(|i| format!("Alternative {i}")));
    header.push("Original Value".into());

    let rows = schema
        .features()
        .iter()
        .enumerate()
        .map(|(f, spec)| {
            let mut row = vec![spec.name.clone()];
            for alt in alternatives {
                let value = alt.instance.get(f);
                let before = original.get(f);
                row.push(if value == before {
                    UNCHANGED.into()
                } else {
                    change_values(&spec.name_value(before), &spec.name_value(value)).1
                });
            }
            row.push(spec.name_value(original.get(f)).to_string());
            row
        })
        .collect();

    let mut confidence = vec![String::from("Confidence score")];
    confidence.extend(alternatives.iter().map(|a| format_percent(a.confidence)));
    confidence.push(format_percent(prediction.confidence));

    Ok(ExplanationTable {
        header,
        rows,
        confidence,
        prediction: prediction.predicted_class.clone(),
    })
}

impl ExplanationTable {
    pub fn columns(&self) -> usize {
        self.header.len()
    }

    /// Monospace table with `|` separators and `-` rules.
    pub fn to_text(&self) -> String {
        let n = self.columns();
        let mut widths: Vec<usize> = vec![0; n];
        for row in core::iter::once(&self.header)
            .chain(&self.rows)
            .chain(core::iter::once(&self.confidence))
        {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let footer_label = "AI prediction";
        widths[0] = widths[0].max(footer_label.len());
        // The footer spans every value column plus the separators between them.
        let span: usize = widths[1..].iter().sum::<usize>() + 3 * (n - 2);
        let prediction_len = self.prediction.chars().count();
        if prediction_len > span {
            widths[n - 1] += prediction_len - span;
        }
        let span: usize = widths[1..].iter().sum::<usize>() + 3 * (n - 2);

        let rule = {
            let parts: Vec<String> = widths.iter().map(|w| "-".repeat(w + 2)).collect();
            format!("+{}+\n", parts.join("+"))
        };
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!(" {} ", pad(c, *w)))
                .collect();
            format!("|{}|\n", parts.join("|"))
        };

        let mut out = String::new();
        out.push_str(&rule);
        out.push_str(&line(&self.header));
        out.push_str(&rule);
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out.push_str(&rule);
        out.push_str(&line(&self.confidence));
        out.push_str(&rule);
        out.push_str(&format!(
            "| {} | {} |\n",
            pad(footer_label, widths[0]),
            center(&self.prediction, span)
        ));
        out.push_str(&rule);
        out
    }

    /// HTML `<table>` fragment; the prediction cell uses `colspan`.
    pub fn to_html(&self) -> String {
        let cells = |tag: &str, row: &[String]| -> String {
            row.iter()
                .map(|c| format!("<{tag}>{}</{tag}>", escape_xml(c)))
                .collect()
        };
        let mut out = String::from("<table class=\"explanation\">\n<thead>\n");
        out.push_str(&format!("<tr>{}</tr>\n", cells("th", &self.header)));
        out.push_str("</thead>\n<tbody>\n");
        for row in &self.rows {
            out.push_str(&format!("<tr>{}</tr>\n", cells("td", row)));
        }
        out.push_str(&format!(
            "<tr class=\"confidence\">{}</tr>\n",
            cells("td", &self.confidence)
        ));
        out.push_str("</tbody>\n<tfoot>\n");
        out.push_str(&format!(
            "<tr><th>AI prediction</th><td colspan=\"{}\">{}</td></tr>\n",
            self.columns() - 1,
            escape_xml(&self.prediction)
        ));
        out.push_str("</tfoot>\n</table>\n");
        out
    }
}

fn pad(text: &str, width: usize) -> String {
    let len = text.chars().count();
    let mut s = String::from(text);
    s.extend(core::iter::repeat_n(' ', width.saturating_sub(len)));
    s
}

fn center(text: &str, width: usize) -> String {
    let len = text.chars().count();
    let total = width.saturating_sub(len);
    let left = total / 2;
    let mut s: String = core::iter::repeat_n(' ', left).collect();
    s.push_str(text);
    s.extend(core::iter::repeat_n(' ', total - left));
    s
}
