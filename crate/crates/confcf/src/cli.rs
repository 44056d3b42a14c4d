//! `confcf` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on domain errors (bad
//! files, schema/model mismatch, invalid values). A query without any
//! counterfactual is an answer, not an error, unless `--strict` is given.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use confcf_core::{render_plot, render_table, Direction, GridSpec, IceCurve, PlotStyle};

use crate::api::{self, InstanceDoc};
use crate::config::SchemaConfig;
use crate::dataset::load_dataset_file;
use crate::error::{read_file, write_file, CliError, Result};
use crate::persist::ModelFile;
use crate::service::{self, ServiceConfig};
use crate::training::train_model;

#[derive(Debug, Parser)]
#[command(
    name = "confcf",
    version,
    about = "Counterfactual explanations of classifier confidence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a logistic model and distance weights on a labelled CSV file.
    Train(TrainArgs),
    /// Predict the class and confidence of one instance.
    Predict(PredictArgs),
    /// Find counterfactuals that move the confidence past a threshold.
    Explain(ExplainArgs),
    /// Sweep features one at a time and write CSV and SVG curves.
    Ice(IceArgs),
    /// Serve the HTTP API for one model.
    Serve(ServeArgs),
}

#[derive(Debug, clap::Args)]
struct TrainArgs {
    /// Schema file (TOML).
    #[arg(long)]
    schema: PathBuf,
    /// Training data (CSV with a header row).
    #[arg(long)]
    data: PathBuf,
    /// Where to write the model file.
    #[arg(long)]
    model: PathBuf,
    /// Overrides the seed from the schema file.
    #[arg(long)]
    seed: Option<u64>,
    /// Fraction of rows held out for evaluation.
    #[arg(long, default_value_t = 0.2)]
    holdout: f64,
}

#[derive(Debug, clap::Args)]
struct ModelArgs {
    /// Model file written by `confcf train`.
    #[arg(long)]
    model: PathBuf,
    /// Schema file to check against the model's schema.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct PredictArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Instance as a JSON object of feature values, inline or a file path.
    #[arg(long)]
    instance: String,
    /// Print the prediction as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Raise,
    Lower,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Raise => Direction::Raise,
            DirectionArg::Lower => Direction::Lower,
        }
    }
}

#[derive(Debug, clap::Args)]
struct ExplainArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    instance: String,
    #[arg(long, value_enum)]
    direction: DirectionArg,
    /// Confidence threshold T in (0, 1].
    #[arg(long)]
    threshold: f64,
    #[arg(long, default_value_t = 2)]
    alternatives: usize,
    /// Exit with status 2 when no counterfactual exists.
    #[arg(long)]
    strict: bool,
    /// Also write explanation.json, sentences.txt, table.txt and table.html here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Print the full response document as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, clap::Args)]
struct IceArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    instance: String,
    /// Comma-separated feature names; all features when omitted.
    #[arg(long, value_delimiter = ',')]
    features: Vec<String>,
    /// Grid for a continuous feature as `Name=min:max:step`; repeatable.
    #[arg(long)]
    grid: Vec<String>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, clap::Args)]
struct ServeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, env = "CONF_CF_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Per-request search budget in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    deadline_ms: u64,
    /// Origin allowed by CORS; any origin when omitted.
    #[arg(long)]
    allow_origin: Option<String>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Train(args) => train(args, out),
        Command::Predict(args) => predict(args, out),
        Command::Explain(args) => explain(args, out),
        Command::Ice(args) => ice(args, out),
        Command::Serve(args) => serve(args, out),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn train(args: TrainArgs, out: &mut dyn Write) -> Result<u8> {
    let config = SchemaConfig::load(&args.schema)?;
    let data = load_dataset_file(&args.data, &config)?;
    let mut settings = config.training.clone();
    if let Some(seed) = args.seed {
        settings.seed = seed;
    }
    let file = train_model(&config, &data, &settings, args.holdout)?;
    file.save(&args.model)?;
    let summary = file.training.as_ref().expect("training summary");
    writeln!(
        out,
        "trained on {} rows ({} held out)",
        summary.rows, summary.holdout_rows
    )
    .map_err(io)?;
    writeln!(
        out,
        "epochs: {} ({})",
        summary.epochs,
        if summary.converged {
            "converged"
        } else {
            "epoch limit"
        }
    )
    .map_err(io)?;
    writeln!(out, "final loss: {:.6}", summary.final_loss).map_err(io)?;
    if let (Some(acc), Some(maj)) = (summary.holdout_accuracy, summary.holdout_majority_rate) {
        writeln!(
            out,
            "holdout accuracy: {:.4} (majority rate {:.4})",
            acc, maj
        )
        .map_err(io)?;
    }
    writeln!(out, "model written to {}", args.model.display()).map_err(io)?;
    Ok(0)
}

fn load_model(args: &ModelArgs) -> Result<ModelFile> {
    let file = ModelFile::load(&args.model)?;
    if let Some(path) = &args.schema {
        let config = SchemaConfig::load(path)?;
        file.ensure_schema(&config.schema)?;
    }
    Ok(file)
}

fn read_instance(arg: &str) -> Result<InstanceDoc> {
    let (text, origin) = if arg.trim_start().starts_with('{') {
        (arg.to_string(), None)
    } else {
        let path = Path::new(arg);
        (read_file(path)?, Some(path))
    };
    serde_json::from_str(&text).map_err(|e| {
        let e = CliError::Json(format!("instance: {e}"));
        match origin {
            Some(p) => e.in_file(p),
            None => e,
        }
    })
}

fn predict(args: PredictArgs, out: &mut dyn Write) -> Result<u8> {
    let file = load_model(&args.model)?;
    let request = api::PredictRequest {
        instance: read_instance(&args.instance)?,
    };
    let p = api::predict(&file, &request)?;
    if args.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&p).expect("serializes")
        )
        .map_err(io)?;
    } else {
        writeln!(out, "class: {}", p.predicted_class).map_err(io)?;
        writeln!(out, "probability: {:.4}", p.probability).map_err(io)?;
        writeln!(out, "confidence: {:.2}", p.confidence).map_err(io)?;
    }
    Ok(0)
}

fn explain(args: ExplainArgs, out: &mut dyn Write) -> Result<u8> {
    let file = load_model(&args.model)?;
    let request = api::CounterfactualsRequest {
        instance: read_instance(&args.instance)?,
        direction: args.direction.into(),
        threshold: args.threshold,
        alternatives: Some(args.alternatives),
    };
    let query = api::query_from_request(&file, &request)?;
    let (response, found) = api::counterfactuals(&file, &query, &mut || false)?;
    let json = serde_json::to_string_pretty(&response).expect("serializes");

    let table = if found.is_empty() {
        None
    } else {
        Some(render_table(
            &file.schema,
            &query.instance,
            &response.original,
            &found,
        )?)
    };
    if let Some(dir) = &args.out_dir {
        create_dir(dir)?;
        write_file(&dir.join("explanation.json"), format!("{json}\n"))?;
        let sentences: String = response
            .counterfactuals
            .iter()
            .map(|c| format!("{}\n", c.sentence))
            .collect();
        write_file(&dir.join("sentences.txt"), sentences)?;
        if let Some(t) = &table {
            write_file(&dir.join("table.txt"), t.to_text())?;
            write_file(&dir.join("table.html"), t.to_html())?;
        }
    }

    if args.json {
        writeln!(out, "{json}").map_err(io)?;
    } else if let Some(t) = &table {
        writeln!(
            out,
            "original: {} (confidence {:.2})",
            response.original.predicted_class, response.original.confidence
        )
        .map_err(io)?;
        for (i, c) in response.counterfactuals.iter().enumerate() {
            writeln!(out, "{}. {}", i + 1, c.sentence).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
        write!(out, "{}", t.to_text()).map_err(io)?;
    } else {
        let reason = response.reason.as_deref().unwrap_or("none");
        writeln!(
            out,
            "{}",
            serde_json::json!({ "counterfactuals": [], "reason": reason })
        )
        .map_err(io)?;
    }
    Ok(if found.is_empty() && args.strict {
        2
    } else {
        0
    })
}

fn parse_grid(spec: &str) -> Result<(String, GridSpec)> {
    let bad = || CliError::Usage(format!("--grid `{spec}`: expected Name=min:max:step"));
    let (name, range) = spec.rsplit_once('=').ok_or_else(bad)?;
    let parts: Vec<f64> = range
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    match parts[..] {
        [min, max, step] if !name.trim().is_empty() => {
            Ok((name.trim().to_string(), GridSpec { min, max, step }))
        }
        _ => Err(bad()),
    }
}

/// File-name-safe form of a feature name.
fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        "feature".into()
    } else {
        s
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn curve_csv(curve: &IceCurve) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["value", "probability", "confidence", "same_class"])
        .expect("in-memory write");
    for p in &curve.points {
        w.write_record([
            p.value.to_string(),
            p.probability.to_string(),
            p.confidence.to_string(),
            p.same_class.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn ice(args: IceArgs, out: &mut dyn Write) -> Result<u8> {
    let file = load_model(&args.model)?;
    let features = if args.features.is_empty() {
        file.schema
            .features()
            .iter()
            .map(|f| f.name.clone())
            .collect()
    } else {
        args.features
    };
    let grids = args
        .grid
        .iter()
        .map(|g| parse_grid(g))
        .collect::<Result<_>>()?;
    let request = api::IceRequest {
        instance: read_instance(&args.instance)?,
        features,
        grids,
    };
    let response = api::ice(&file, &request)?;
    create_dir(&args.out_dir)?;
    for curve in &response.curves {
        let stem = slug(&curve.feature);
        let csv_path = args.out_dir.join(format!("{stem}.csv"));
        let svg_path = args.out_dir.join(format!("{stem}.svg"));
        write_file(&csv_path, curve_csv(curve))?;
        write_file(&svg_path, render_plot(curve, &PlotStyle::default())?)?;
        writeln!(
            out,
            "{}: {} points -> {}, {}",
            curve.feature,
            curve.points.len(),
            csv_path.display(),
            svg_path.display()
        )
        .map_err(io)?;
    }
    Ok(0)
}

fn serve(args: ServeArgs, out: &mut dyn Write) -> Result<u8> {
    let file = load_model(&args.model)?;
    let config = ServiceConfig {
        deadline: Duration::from_millis(args.deadline_ms),
        allow_origin: args.allow_origin,
    };
    let router = service::router(file, &config)?;
    let runtime = tokio::runtime::Runtime::new().map_err(io)?;
    let addr = format!("{}:{}", args.host, args.port);
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| CliError::Usage(format!("cannot listen on {addr}: {e}")))?;
        writeln!(out, "listening on http://{addr}").map_err(io)?;
        out.flush().map_err(io)?;
        service::serve(listener, router).await.map_err(io)
    })?;
    Ok(0)
}
