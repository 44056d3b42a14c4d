//! File formats, command line and HTTP service around [`confcf_core`].
//!
//! * [`config`] reads schema files (TOML) with the label definition.
//! * [`dataset`] loads labelled CSV data against a schema.
//! * [`persist`] reads and writes versioned model files (JSON).
//! * [`api`] defines the request and response documents.
//! * [`service`] exposes them over HTTP; [`cli`] from the shell.

pub mod api;
pub mod cli;
pub mod config;
pub mod dataset;
mod error;
pub mod persist;
pub mod service;
pub mod training;

pub use error::{CliError, Result};
