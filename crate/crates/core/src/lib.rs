//! Counterfactual explanations of a binary classifier's confidence score.
//!
//! The crate answers questions of the form "why is the model 91.5% confident
//! rather than less than 50%?" for logistic models over mixed tabular data:
//!
//! * [`tabular`] describes features, instances, their one-hot ("mixed")
//!   encoding and the MAD-based distance weights.
//! * [`model`] holds the logistic model, its training loop and the margin of
//!   confidence `U = |2P - 1|`.
//! * [`search`] finds minimal weighted-L1 changes that move the confidence
//!   across a threshold while keeping the predicted class.
//! * [`ice`] sweeps one feature at a time to chart the confidence landscape.
//! * [`render`] turns results into sentences, tables and SVG plots.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the CLI and
//! the HTTP service live in the `confcf` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod ice;
mod math;
pub mod model;
pub mod render;
pub mod search;
pub mod tabular;

pub use error::{Error, NoCounterfactualReason, Result};
pub use ice::{ice_batch, ice_curve, CurveKind, GridSpec, IceCurve, IcePoint};
pub use model::{
    confidence, train, ClassLabels, ClassSide, LogisticModel, Prediction, TrainConfig,
};
pub use render::{
    format_distinct, format_number, format_percent, render_plot, render_sentence, render_table,
    ExplanationTable, PlotStyle,
};
pub use search::{
    check, find_counterfactuals, find_counterfactuals_until, required_probability_interval, verify,
    Counterfactual, CounterfactualQuery, Direction, FeatureChange, ProbabilityInterval,
    SearchOutcome, Violation,
};
pub use tabular::{
    decode, encode, mad_weights, weighted_l1, DistanceWeights, EncodedVector, FeatureKind,
    FeatureSchema, FeatureSpec, Instance, NamedValue, Value,
};
