//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. `UPDATE_GOLDEN=1` rewrites `fixtures/golden`.

mod common;
#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use confcf::config::SchemaConfig;
use confcf::dataset::{load_dataset_file, Dataset};
use confcf::persist::ModelFile;
use confcf::training::train_model;
use confcf_core::model::{holdout_split, Objective};
use confcf_core::{
    confidence, encode, find_counterfactuals, ice_curve, render_plot, render_sentence,
    render_table, Counterfactual, CounterfactualQuery, Direction, Error, GridSpec, Instance,
    PlotStyle, Value,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Report {
    failures: usize,
}

impl Report {
    fn run(&mut self, name: &str, budget: Duration, check: impl FnOnce() -> Check) {
        let start = Instant::now();
        let result = check();
        self.record(name, budget, start.elapsed(), result);
    }

    fn record(&mut self, name: &str, budget: Duration, elapsed: Duration, result: Check) {
        let timing = format!(
            "{:.2}s of {:.0}s",
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
        let (status, detail) = match result {
            Ok(_) if elapsed > budget => ("FAIL", format!("over time budget ({timing})")),
            Ok(detail) => ("PASS", format!("{detail}; {timing}")),
            Err(detail) => ("FAIL", format!("{detail}; {timing}")),
        };
        if status == "FAIL" {
            self.failures += 1;
        }
        println!("{status} {name}: {detail}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn confidence_formula() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p: f64 = rng.random_range(0.0..=1.0);
        let u = confidence(p).map_err(|e| e.to_string())?;
        let mirrored = confidence(1.0 - p).map_err(|e| e.to_string())?;
        worst = worst
            .max((u - (2.0 * p - 1.0).abs()).abs())
            .max((u - mirrored).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    ensure(confidence(0.5) == Ok(0.0), || "confidence(0.5) != 0".into())?;
    Ok(format!("1000 samples, max deviation {worst:e}"))
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let (mut found, mut infeasible) = (0, 0);
    for case in 0..100 {
        let p = support::random_problem(&mut rng);
        match support::compare_with_brute_force(&p) {
            Ok(support::OracleOutcome::Found { .. }) => found += 1,
            Ok(support::OracleOutcome::BothInfeasible) => infeasible += 1,
            Err(msg) => return Err(format!("problem {case}: {msg}")),
        }
    }
    Ok(format!(
        "100 problems ({found} feasible, {infeasible} infeasible)"
    ))
}

/// Probability from the raw affine form, without going through `predict`.
fn probability(file: &ModelFile, x: &Instance) -> f64 {
    let (bias, coefs) = file.model.raw_affine();
    let encoded = encode(x, &file.schema);
    let s: f64 = bias
        + coefs
            .iter()
            .zip(encoded.as_slice())
            .map(|(w, v)| w * v)
            .sum::<f64>();
    1.0 / (1.0 + (-s).exp())
}

fn distance(file: &ModelFile, a: &Instance, b: &Instance) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .enumerate()
        .map(|(i, (x, y))| {
            let w = file.weights.get(i);
            match (x, y) {
                (Value::Real(x), Value::Real(y)) => w * (x - y).abs(),
                (x, y) if x == y => 0.0,
                _ => w,
            }
        })
        .sum()
}

fn constraint_suite(file: &ModelFile, data: &Dataset) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let d = file.model.decision_boundary();
    let (mut returned, mut empty) = (0, 0);
    for q in 0..1000 {
        let row = &data.instances[rng.random_range(0..data.len())];
        let direction = if rng.random_bool(0.5) {
            Direction::Raise
        } else {
            Direction::Lower
        };
        let threshold = rng.random_range(0.02..0.98);
        let query = CounterfactualQuery::new(row.clone(), direction, threshold)
            .with_alternatives(rng.random_range(1..=3));
        let cfs = match find_counterfactuals(&file.model, &file.weights, &file.schema, &query) {
            Ok(cfs) => cfs,
            Err(Error::NoCounterfactual(_)) => {
                empty += 1;
                continue;
            }
            Err(e) => return Err(format!("query {q}: {e}")),
        };
        let p0 = probability(file, row);
        let margin = 2.0 * query.epsilon_strict - 1e-12;
        for cf in &cfs {
            returned += 1;
            let p = probability(file, &cf.instance);
            let u = (2.0 * p - 1.0).abs();
            ensure((p >= d) == (p0 >= d), || {
                format!("query {q}: class changed ({p0} -> {p})")
            })?;
            let side_ok = match direction {
                Direction::Raise => u - threshold >= margin,
                Direction::Lower => threshold - u >= margin,
            };
            ensure(side_ok, || {
                format!("query {q}: U' = {u} vs T = {threshold} ({direction:?})")
            })?;
            let cost = distance(file, row, &cf.instance);
            ensure(cost >= query.min_distance, || {
                format!("query {q}: cost {cost} below minimum")
            })?;
            ensure((cost - cf.cost).abs() <= 1e-9 * cost.max(1.0), || {
                format!("query {q}: reported cost {} vs {cost}", cf.cost)
            })?;
            cf.instance
                .validate(&file.schema)
                .map_err(|e| format!("query {q}: out of domain: {e}"))?;
        }
    }
    Ok(format!(
        "1000 queries, {returned} counterfactuals, {empty} without any, 0 violations"
    ))
}

fn analytic_fixture() -> Check {
    let file = common::single_feature();
    let origin = Instance::new(&file.schema, vec![Value::Real(2.0)]).unwrap();
    let query = CounterfactualQuery::new(origin, Direction::Lower, 0.5);
    let cfs = find_counterfactuals(&file.model, &file.weights, &file.schema, &query)
        .map_err(|e| e.to_string())?;
    let x = cfs[0].instance.get(0).as_real().unwrap();
    let target = 3f64.ln();
    ensure((x - target).abs() <= 1e-4, || {
        format!("x' = {x}, expected {target}")
    })?;
    let cost = cfs[0].cost;
    ensure((cost - (2.0 - target)).abs() <= 1e-4, || {
        format!("cost {cost}")
    })?;
    Ok(format!("x' = {x:.6}, cost = {cost:.6}"))
}

fn ice_consistency() -> Check {
    let file = common::mixed();
    let schema = &file.schema;
    let instance = Instance::new(
        schema,
        vec![Value::Level(2), Value::Real(4.0), Value::Real(7.0)],
    )
    .unwrap();
    let fine = GridSpec {
        min: 0.0,
        max: 10.0,
        step: 0.1,
    };
    let mut checked = 0;
    for (feature, grid) in [
        ("Marital Status", None),
        ("Hours", None),
        ("Age", None),
        ("Age", Some(fine)),
    ] {
        let curve =
            ice_curve(&file.model, schema, &instance, feature, grid).map_err(|e| e.to_string())?;
        let index = schema.index_of(feature).unwrap();
        for point in &curve.points {
            let value = schema.feature(index).resolve(&point.value).unwrap();
            let swept = instance.with_value(schema, index, value).unwrap();
            let direct = file.model.predict(&swept, schema).unwrap();
            ensure(
                point.probability == direct.probability && point.confidence == direct.confidence,
                || format!("{feature} at {}: curve disagrees with predict", point.value),
            )?;
            checked += 1;
        }
        if grid.is_some() {
            ensure(curve.points.len() == 101, || {
                format!("{} points on (0, 10, 0.1)", curve.points.len())
            })?;
        }
        if feature == "Hours" {
            let first = curve.points[0].probability;
            ensure(curve.points.iter().all(|p| p.probability == first), || {
                "zero-coefficient curve is not flat".into()
            })?;
        }
    }
    Ok(format!(
        "{checked} points equal predict, 101-point grid, flat zero-coefficient curve"
    ))
}

struct Adult {
    config: SchemaConfig,
    data: Dataset,
    file: ModelFile,
    train_time: Duration,
}

fn train_adult() -> Result<Adult, String> {
    let start = Instant::now();
    let config =
        SchemaConfig::load(&common::fixture("adult_schema.toml")).map_err(|e| e.to_string())?;
    let data = load_dataset_file(&common::fixture("adult_subset.csv"), &config)
        .map_err(|e| e.to_string())?;
    let file = train_model(&config, &data, &config.training, 0.2).map_err(|e| e.to_string())?;
    Ok(Adult {
        config,
        data,
        file,
        train_time: start.elapsed(),
    })
}

const SWEPT: &str = "Marital Status";

/// Sweeps the other levels of `SWEPT` for held-out rows and renders the
/// first table that has alternatives on both sides of the original.
fn table_reproduction(adult: &Adult) -> Check {
    let schema = &adult.file.schema;
    let model = &adult.file.model;
    let index = schema.index_of(SWEPT).ok_or("no marital status feature")?;
    let levels = schema.feature(index).levels().len();
    let (_, test) = holdout_split(adult.data.len(), 0.2, adult.config.training.seed);
    for &row in &test {
        let original = &adult.data.instances[row];
        let prediction = model.predict(original, schema).map_err(|e| e.to_string())?;
        let mut alternatives = Vec::new();
        for level in (0..levels).filter(|&l| Value::Level(l) != original.get(index)) {
            let swept = original
                .with_value(schema, index, Value::Level(level))
                .unwrap();
            let cf = Counterfactual::evaluate(model, &adult.file.weights, schema, original, swept)
                .map_err(|e| e.to_string())?;
            if cf.predicted_class == prediction.predicted_class {
                alternatives.push(cf);
            }
        }
        let above = alternatives
            .iter()
            .any(|c| c.confidence > prediction.confidence);
        let below = alternatives
            .iter()
            .any(|c| c.confidence < prediction.confidence);
        if !(above && below) {
            continue;
        }
        let table = render_table(schema, original, &prediction, &alternatives)
            .map_err(|e| e.to_string())?;
        check_table_layout(&table.to_text(), schema.len(), alternatives.len(), index)?;
        let html = table.to_html();
        ensure(
            html.contains(&format!("colspan=\"{}\"", alternatives.len() + 1)),
            || "html footer does not span the value columns".into(),
        )?;
        println!("{}", table.to_text().trim_end());
        return Ok(format!(
            "held-out row {row}, original {} with alternatives {}",
            table.confidence.last().unwrap(),
            table.confidence[1..=alternatives.len()].join(", ")
        ));
    }
    Err("no held-out row has alternatives on both sides".into())
}

fn cells(line: &str) -> Vec<&str> {
    line.trim_matches('|').split('|').map(str::trim).collect()
}

fn check_table_layout(
    text: &str,
    features: usize,
    alts: usize,
    swept: usize,
) -> Result<(), String> {
    let lines: Vec<&str> = text.lines().collect();
    let rule = lines[0];
    // rule, header, rule, features, rule, confidence, rule, footer, rule
    ensure(lines.len() == features + 8, || {
        format!("{} lines", lines.len())
    })?;
    for i in [0, 2, features + 3, features + 5, features + 7] {
        ensure(lines[i] == rule, || format!("line {i} is not a rule"))?;
    }
    let mut header = vec!["Attribute".to_string()];
    header.extend((1..=alts).map(|n| format!("Alternative {n}")));
    header.push("Original Value".into());
    ensure(cells(lines[1]) == header, || {
        format!("header {:?}", cells(lines[1]))
    })?;
    for f in 0..features {
        let row = cells(lines[3 + f]);
        let unchanged = row[1..=alts].iter().all(|c| *c == "-");
        ensure(unchanged == (f != swept), || format!("row {f}: {row:?}"))?;
    }
    let confidence = cells(lines[features + 4]);
    ensure(confidence[0] == "Confidence score", || {
        "no confidence row".into()
    })?;
    ensure(confidence[1..].iter().all(|c| c.ends_with('%')), || {
        "confidence not in percent".into()
    })?;
    let footer = cells(lines[features + 6]);
    ensure(footer.len() == 2 && footer[0] == "AI prediction", || {
        format!("footer {footer:?}")
    })?;
    Ok(())
}

fn training_sanity(adult: &Adult) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(5..30);
        let width = rng.random_range(1..6);
        let rows: Vec<f64> = (0..n * width)
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        let targets: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
            .collect();
        let params: Vec<f64> = (0..=width).map(|_| rng.random_range(-1.0..1.0)).collect();
        let obj = Objective::new(rows, width, targets, rng.random_range(0.0..0.1));
        let (_, grad) = obj.loss_and_gradient(&params);
        let h = 1e-5;
        for k in 0..params.len() {
            let (mut plus, mut minus) = (params.clone(), params.clone());
            plus[k] += h;
            minus[k] -= h;
            let fd = (obj.loss(&plus) - obj.loss(&minus)) / (2.0 * h);
            worst = worst.max((fd - grad[k]).abs() / grad[k].abs().max(fd.abs()).max(1e-3));
        }
    }
    ensure(worst < 1e-5, || {
        format!("gradient relative error {worst:e}")
    })?;
    let summary = adult.file.training.as_ref().ok_or("no training summary")?;
    let acc = summary.holdout_accuracy.ok_or("no holdout")?;
    let majority = summary.holdout_majority_rate.ok_or("no holdout")?;
    ensure(acc > majority, || {
        format!("holdout accuracy {acc:.4} <= majority rate {majority:.4}")
    })?;
    Ok(format!(
        "gradient relative error {worst:.1e}; holdout accuracy {acc:.4} > majority {majority:.4}"
    ))
}

const GOLDEN_SENTENCE: &str =
    "One way you could have got a confidence score of less than 0.5 (0.44) \
instead is if Marital Status had taken value Married rather than Divorced/Widowed.";

/// Every rendered artifact for the fixed fixtures, keyed by golden file name.
fn render_all() -> Result<Vec<(&'static str, String)>, String> {
    let marital = common::marital();
    let origin = Instance::new(&marital.schema, vec![Value::Level(2)]).unwrap();
    let query = CounterfactualQuery::new(origin, Direction::Lower, 0.5).with_alternatives(1);
    let cfs = find_counterfactuals(&marital.model, &marital.weights, &marital.schema, &query)
        .map_err(|e| e.to_string())?;
    let mut sentences = String::new();
    for cf in &cfs {
        writeln!(sentences, "{}", render_sentence(&query, cf)).unwrap();
    }

    let mixed = common::mixed();
    let schema = &mixed.schema;
    let origin = Instance::new(
        schema,
        vec![Value::Level(2), Value::Real(4.0), Value::Real(7.0)],
    )
    .unwrap();
    let query =
        CounterfactualQuery::new(origin.clone(), Direction::Raise, 0.6).with_alternatives(3);
    let cfs = find_counterfactuals(&mixed.model, &mixed.weights, schema, &query)
        .map_err(|e| e.to_string())?;
    for cf in &cfs {
        writeln!(sentences, "{}", render_sentence(&query, cf)).unwrap();
    }
    let prediction = mixed.model.predict(&origin, schema).unwrap();
    let table = render_table(schema, &origin, &prediction, &cfs).map_err(|e| e.to_string())?;

    let style = PlotStyle::default();
    let plot = |feature: &str| -> Result<String, String> {
        let curve =
            ice_curve(&mixed.model, schema, &origin, feature, None).map_err(|e| e.to_string())?;
        render_plot(&curve, &style).map_err(|e| e.to_string())
    };
    Ok(vec![
        ("sentences.txt", sentences),
        ("table.txt", table.to_text()),
        ("table.html", table.to_html()),
        ("ice_marital_status.svg", plot("Marital Status")?),
        ("ice_age.svg", plot("Age")?),
    ])
}

fn golden_renders() -> Check {
    let first = render_all()?;
    let second = render_all()?;
    ensure(first == second, || {
        "two runs rendered different bytes".into()
    })?;
    let sentence = first[0].1.lines().next().unwrap_or_default();
    ensure(sentence == GOLDEN_SENTENCE, || {
        format!("sentence was {sentence:?}")
    })?;
    let dir = common::fixture("golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, bytes) in &first {
        let path = dir.join(name);
        if update {
            std::fs::write(&path, bytes).map_err(|e| e.to_string())?;
        }
        let expected = read(&path)?;
        ensure(&expected == bytes, || {
            format!("{name} differs from the golden file")
        })?;
    }
    Ok(format!(
        "{} artifacts byte-identical, example sentence verbatim",
        first.len()
    ))
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    report.run(
        "confidence formula",
        Duration::from_secs(1),
        confidence_formula,
    );
    report.run(
        "oracle equivalence",
        Duration::from_secs(30),
        oracle_equivalence,
    );

    let adult = train_adult();
    match &adult {
        Ok(adult) => {
            report.run("constraint suite", Duration::from_secs(60), || {
                constraint_suite(&adult.file, &adult.data)
            });
        }
        Err(e) => report.record(
            "constraint suite",
            Duration::from_secs(60),
            Duration::ZERO,
            Err(e.clone()),
        ),
    }
    report.run("analytic fixture", Duration::from_secs(1), analytic_fixture);
    report.run("ice consistency", Duration::from_secs(5), ice_consistency);
    let table_budget = Duration::from_secs(120);
    match &adult {
        Ok(adult) => {
            let start = Instant::now();
            let result = table_reproduction(adult);
            report.record(
                "table reproduction",
                table_budget,
                adult.train_time + start.elapsed(),
                result,
            );
            report.run("training sanity", Duration::from_secs(5), || {
                training_sanity(adult)
            });
        }
        Err(e) => {
            report.record(
                "table reproduction",
                table_budget,
                Duration::ZERO,
                Err(e.clone()),
            );
            report.record(
                "training sanity",
                Duration::from_secs(5),
                Duration::ZERO,
                Err(e.clone()),
            );
        }
    }
    report.run("golden renders", Duration::from_secs(5), golden_renders);

    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
