use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{escape_xml, format_number};
use crate::error::{Error, Result};
use crate::ice::{CurveKind, IceCurve};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    pub color: String,
    pub highlight: String,
    /// Fill behind grid points whose predicted class differs from the original.
    pub other_class: String,
    pub font_family: String,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            width: 640,
            height: 400,
            color: "#4878a8".into(),
            highlight: "#d95f02".into(),
            other_class: "#eeeeee".into(),
            font_family: "sans-serif".into(),
        }
    }
}

const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 64.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(style: &PlotStyle) -> Self {
        Self {
            x0: LEFT,
            x1: f64::from(style.width) - RIGHT,
            y0: TOP,
            y1: f64::from(style.height) - BOTTOM,
        }
    }

    fn y(&self, confidence: f64) -> f64 {
        self.y1 - confidence.clamp(0.0, 1.0) * (self.y1 - self.y0)
    }

    fn width(&self) -> f64 {
        self.x1 - self.x0
    }
}

/// SVG chart of an ICE curve: bars for a categorical feature, a polyline
/// for a continuous one. The y axis is the confidence score on [0, 1]; the
/// original value is drawn in the highlight color.
pub fn render_plot(curve: &IceCurve, style: &PlotStyle) -> Result<String> {
    if curve.points.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let frame = Frame::new(style);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" font-family=\"{2}\" font-size=\"12\">",
        style.width,
        style.height,
        escape_xml(&style.font_family)
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        style.width, style.height
    );
    let title = format!("{} \u{2014} {}", curve.prediction_class, curve.feature);
    let _ = writeln!(
        svg,
        "<text class=\"title\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        f64::from(style.width) / 2.0,
        TOP / 2.0 + 6.0,
        escape_xml(&title)
    );

    match curve.kind {
        CurveKind::Categorical => bars(&mut svg, curve, style, &frame),
        CurveKind::Continuous => line(&mut svg, curve, style, &frame),
    }
    axes(&mut svg, curve, &frame);
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn axes(svg: &mut String, curve: &IceCurve, f: &Frame) {
    let _ = writeln!(
        svg,
        "<g class=\"axes\" stroke=\"#333333\" fill=\"none\"><path d=\"M{:.2} {:.2}V{:.2}H{:.2}\"/></g>",
        f.x0, f.y0, f.y1, f.x1
    );
    svg.push_str("<g class=\"y-ticks\" text-anchor=\"end\">\n");
    for i in 0..=4 {
        let v = f64::from(i) / 4.0;
        let y = f.y(v);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#333333\"/><text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            f.x0 - 4.0,
            f.x0,
            f.x0 - 8.0,
            y + 4.0,
            format_number(v)
        );
    }
    svg.push_str("</g>\n");
    let _ = writeln!(
        svg,
        "<text class=\"y-label\" transform=\"translate({:.2} {:.2}) rotate(-90)\" text-anchor=\"middle\">Confidence score</text>",
        16.0,
        (f.y0 + f.y1) / 2.0
    );
    let _ = writeln!(
        svg,
        "<text class=\"x-label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        (f.x0 + f.x1) / 2.0,
        f.y1 + 48.0,
        escape_xml(&curve.feature)
    );
}

fn bars(svg: &mut String, curve: &IceCurve, style: &PlotStyle, f: &Frame) {
    let n = curve.points.len() as f64;
    let slot = f.width() / n;
    let bar = slot * 0.7;
    svg.push_str("<g class=\"bars\">\n");
    for (i, p) in curve.points.iter().enumerate() {
        let x = f.x0 + slot * i as f64 + (slot - bar) / 2.0;
        let y = f.y(p.confidence);
        let fill = if curve.origin_index == Some(i) {
            &style.highlight
        } else {
            &style.color
        };
        let _ = writeln!(
            svg,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar:.2}\" height=\"{:.2}\" fill=\"{}\" fill-opacity=\"{}\"><title>{}: {:.4}</title></rect>",
            f.y1 - y,
            escape_xml(fill),
            if p.same_class { "1" } else { "0.4" },
            escape_xml(&p.value.to_string()),
            p.confidence
        );
    }
    svg.push_str("</g>\n<g class=\"x-ticks\" text-anchor=\"middle\">\n");
    for (i, p) in curve.points.iter().enumerate() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            f.x0 + slot * (i as f64 + 0.5),
            f.y1 + 18.0,
            escape_xml(&p.value.to_string())
        );
    }
    svg.push_str("</g>\n");
}

fn line(svg: &mut String, curve: &IceCurve, style: &PlotStyle, f: &Frame) {
    let xs: Vec<f64> = curve
        .points
        .iter()
        .map(|p| p.value.as_number().unwrap_or(0.0))
        .collect();
    let lo = xs[0];
    let hi = xs[xs.len() - 1];
    let span = if hi > lo { hi - lo } else { 1.0 };
    let x_of = |v: f64| f.x0 + (v - lo) / span * f.width();

    // Shade runs of grid points on the other side of the decision boundary.
    let mut i = 0;
    while i < curve.points.len() {
        if curve.points[i].same_class {
            i += 1;
            continue;
        }
        let start = i;
        while i < curve.points.len() && !curve.points[i].same_class {
            i += 1;
        }
        let a = x_of(xs[start]);
        let b = x_of(xs[i - 1]);
        let _ = writeln!(
            svg,
            "<rect class=\"other-class\" x=\"{a:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
            f.y0,
            b - a,
            f.y1 - f.y0,
            escape_xml(&style.other_class)
        );
    }

    let vertices: Vec<String> = curve
        .points
        .iter()
        .zip(&xs)
        .map(|(p, &x)| format!("{:.2},{:.2}", x_of(x), f.y(p.confidence)))
        .collect();
    let _ = writeln!(
        svg,
        "<polyline class=\"curve\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
        escape_xml(&style.color),
        vertices.join(" ")
    );
    if let Some(o) = curve.origin_index {
        let _ = writeln!(
            svg,
            "<circle class=\"origin\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"{}\"><title>{}: {:.4}</title></circle>",
            x_of(xs[o]),
            f.y(curve.points[o].confidence),
            escape_xml(&style.highlight),
            escape_xml(&curve.points[o].value.to_string()),
            curve.points[o].confidence
        );
    }
    svg.push_str("<g class=\"x-ticks\" text-anchor=\"middle\">\n");
    for k in 0..=4 {
        let v = lo + span * f64::from(k) / 4.0;
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            x_of(v),
            f.y1 + 18.0,
            format_number(v)
        );
    }
    svg.push_str("</g>\n");
}
