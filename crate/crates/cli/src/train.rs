use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use advtrain::attack::{default_delta, DEFAULT_PERCENTILE};
use advtrain::data::{split, standardize, Standardization};
use advtrain::{fit, DVector, Dataset, FitResult, NormKind, SolveOptions, Solver, Task};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::args::{DeltaArg, TaskArg, TrainArgs};
use crate::error::{CliError, CliResult};
use crate::metrics::evaluate;
use crate::output::{write_csv_rows, write_json};
use crate::source::Source;

/// Everything needed to reproduce a training run from the same inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub task: String,
    pub norm: String,
    pub solver: String,
    /// Radius actually used.
    pub delta: f64,
    /// `default` when `delta` came from the Monte-Carlo rule, else `fixed`.
    pub delta_rule: String,
    pub mc_samples: usize,
    pub source: Source,
    pub standardize: bool,
    pub test_fraction: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub step_size: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub solver: String,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Derived solver settings such as step sizes and ρ.
    pub settings: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit: Option<FitSummary>,
    pub metrics: BTreeMap<String, f64>,
    pub wall_time_s: f64,
}

/// Contents of `model.json`. Predictions are `((x - means) / scales)ᵀβ + y_mean`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub beta: Vec<f64>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub y_mean: f64,
    pub config: TrainConfig,
}

impl ModelFile {
    pub fn read(path: &Path) -> CliResult<ModelFile> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: not a model file: {e}", path.display())))
    }

    pub fn transform(&self) -> Standardization {
        Standardization { means: DVector::from_vec(self.means.clone()), scales: DVector::from_vec(self.scales.clone()), y_mean: self.y_mean }
    }

    pub fn task(&self) -> CliResult<Task> {
        parse_task(&self.config.task)
    }

    pub fn norm(&self) -> CliResult<NormKind> {
        Ok(self.config.norm.parse()?)
    }
}

#[derive(Debug, Serialize)]
struct TraceRow {
    iter: usize,
    objective: f64,
    seconds: f64,
}

pub fn parse_task(s: &str) -> CliResult<Task> {
    TaskArg::from_str(s, true).map(Task::from).map_err(|_| CliError::Usage(format!("unknown task `{s}` (expected reg or clf)")))
}

fn task_name(task: Task) -> &'static str {
    match task {
        Task::Regression => "reg",
        Task::BinaryClassification => "clf",
    }
}

pub fn default_solver(task: Task) -> Solver {
    match task {
        Task::Regression => Solver::Irrr,
        Task::BinaryClassification => Solver::Agd,
    }
}

/// Output of one training run.
pub struct Trained {
    pub model: ModelFile,
    pub report: RunReport,
    pub fit: FitResult,
}

/// Resolves the radius, fits, and scores the model on the training rows and
/// on the held-out rows if any.
pub fn run(mut config: TrainConfig, echo_trace: bool) -> CliResult<Trained> {
    let start = Instant::now();
    let task = parse_task(&config.task)?;
    let norm: NormKind = config.norm.parse()?;
    let solver: Solver = config.solver.parse()?;
    if solver.task() != task {
        return Err(CliError::Usage(format!("solver {solver} is for {} data, not --task {}", solver.task(), config.task)));
    }
    let data = config.source.load(task)?;
    let (train, test) = match config.test_fraction {
        Some(f) => {
            let (a, b) = split(&data, f, config.seed)?;
            (a, Some(b))
        }
        None => (data, None),
    };
    let (train_s, transform) = if config.standardize {
        standardize(&train)?
    } else {
        let t = Standardization { means: DVector::zeros(train.p()), scales: DVector::from_element(train.p(), 1.0), y_mean: 0.0 };
        (train.clone(), t)
    };
    if config.delta_rule == "default" {
        config.delta = default_delta(train_s.x(), norm, config.mc_samples, DEFAULT_PERCENTILE, config.seed)?;
    }
    let opts = SolveOptions {
        max_iter: config.max_iter,
        tol: config.tol,
        seed: config.seed,
        step_size: config.step_size,
        record_trace: true,
        ..Default::default()
    };
    let result = fit(&train_s, norm, config.delta, solver, &opts)?;
    if echo_trace {
        for t in &result.trace {
            eprintln!("{:>6} {:.12e} {:.6}", t.iter, t.objective, t.seconds);
        }
    }

    let mut metrics = BTreeMap::from([("delta".to_string(), config.delta), ("objective".to_string(), result.objective)]);
    let scored: [(&str, Option<Dataset>); 2] = [("train", Some(train_s)), ("test", test.map(|t| transform.apply(&t)).transpose()?)];
    for (prefix, d) in scored {
        if let Some(d) = d {
            for (k, v) in evaluate(&d, &result.beta, norm, config.delta)? {
                metrics.insert(format!("{prefix}_{k}"), v);
            }
        }
    }
    let model = ModelFile {
        beta: result.beta.iter().copied().collect(),
        means: transform.means.iter().copied().collect(),
        scales: transform.scales.iter().copied().collect(),
        y_mean: transform.y_mean,
        config: config.clone(),
    };
    let report = RunReport {
        config: serde_json::to_value(&config).expect("config is serializable"),
        fit: Some(FitSummary {
            solver: result.solver.clone(),
            objective: result.objective,
            iterations: result.iterations,
            converged: result.converged,
            settings: result.config.clone(),
        }),
        metrics,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(Trained { model, report, fit: result })
}

pub fn config_from_args(a: &TrainArgs) -> TrainConfig {
    let task = Task::from(a.task);
    let source = a.source.source();
    let (delta, delta_rule) = match a.delta {
        DeltaArg::Default => (f64::NAN, "default"),
        DeltaArg::Value(v) => (v, "fixed"),
    };
    TrainConfig {
        task: task_name(task).into(),
        norm: a.norm.to_string(),
        solver: a.solver.unwrap_or_else(|| default_solver(task)).to_string(),
        delta,
        delta_rule: delta_rule.into(),
        mc_samples: a.mc_samples,
        source,
        standardize: !a.no_standardize,
        test_fraction: a.test_fraction,
        tol: a.tol,
        max_iter: a.max_iter,
        seed: a.seed,
        step_size: a.step_size,
    }
}

/// Writes `model.json`, `trace.csv` and `report.json` into `out`.
pub fn write_outputs(out: &Path, t: &Trained) -> CliResult<()> {
    std::fs::create_dir_all(out)?;
    write_json(&out.join("model.json"), &t.model)?;
    write_json(&out.join("report.json"), &t.report)?;
    let rows = t.fit.trace.iter().map(|p| TraceRow { iter: p.iter, objective: p.objective, seconds: p.seconds });
    write_csv_rows(&out.join("trace.csv"), rows)
}

pub fn cmd_train(a: &TrainArgs) -> CliResult<RunReport> {
    let trained = run(config_from_args(a), a.trace)?;
    write_outputs(&a.out, &trained)?;
    Ok(trained.report)
}

/// Reads the `config` object of a model or report file and trains again.
pub fn cmd_replay(report: &Path, out: &Path) -> CliResult<RunReport> {
    let text = std::fs::read_to_string(report).map_err(|e| CliError::Data(format!("{}: {e}", report.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", report.display())))?;
    let config: TrainConfig = value
        .get("config")
        .cloned()
        .ok_or_else(|| CliError::Data(format!("{}: no `config` object", report.display())))
        .and_then(|c| serde_json::from_value(c).map_err(|e| CliError::Data(format!("{}: bad config: {e}", report.display()))))?;
    let trained = run(config, false)?;
    write_outputs(out, &trained)?;
    Ok(trained.report)
}
