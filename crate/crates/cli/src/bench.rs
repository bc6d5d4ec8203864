use advtrain::attack::{default_delta, DEFAULT_MC_SAMPLES, DEFAULT_PERCENTILE};
use advtrain::data::{generate, load_csv, standardize, Family, SynthSpec, TargetColumn, ILL_CONDITIONED_DELTA};
use advtrain::suite::{convergence_suite, timing_suite};
use advtrain::{Dataset, NormKind, SolveOptions, Solver, Task};
use serde::Serialize;

use crate::args::{BenchArgs, DeltaArg, Suite};
use crate::error::{CliError, CliResult};
use crate::output::write_csv_rows;
use crate::source::{synthesize, ILL_CONDITIONED};

#[derive(Debug, Serialize)]
struct SuboptimalityOut {
    solver: String,
    iter: usize,
    objective: f64,
    suboptimality: f64,
    seconds: f64,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct TimingOut {
    size: usize,
    solver: String,
    median_seconds: f64,
    repetitions: usize,
    seed: u64,
}

fn default_solvers(task: Task, suite: Suite) -> Vec<Solver> {
    match (task, suite) {
        (Task::Regression, _) => vec![Solver::Irrr, Solver::Icg],
        (Task::BinaryClassification, Suite::Convergence) => vec![Solver::Gd, Solver::GdLs, Solver::Agd, Solver::Sgd, Solver::Saga],
        (Task::BinaryClassification, Suite::Timing) => vec![Solver::Agd, Solver::Saga],
    }
}

fn resolve_delta(arg: Option<DeltaArg>, preset: bool, data: &Dataset, norm: NormKind, seed: u64) -> advtrain::Result<f64> {
    match arg {
        Some(DeltaArg::Value(v)) => Ok(v),
        None if preset => Ok(ILL_CONDITIONED_DELTA),
        _ => default_delta(data.x(), norm, DEFAULT_MC_SAMPLES, DEFAULT_PERCENTILE, seed),
    }
}

/// Runs the requested suite once per seed and writes `suboptimality.csv`
/// or `timing.csv` into `--out`. Returns the number of rows written.
pub fn cmd_bench(a: &BenchArgs) -> CliResult<usize> {
    let task = Task::from(a.task);
    let solvers = if a.solvers.is_empty() { default_solvers(task, a.suite) } else { a.solvers.clone() };
    if let Some(s) = solvers.iter().find(|s| s.task() != task) {
        return Err(CliError::Usage(format!("solver {s} does not apply to {task} benchmarks")));
    }
    if a.seeds.is_empty() {
        return Err(CliError::Usage("--seeds needs at least one value".into()));
    }
    std::fs::create_dir_all(&a.out)?;
    match a.suite {
        Suite::Convergence => convergence(a, task, &solvers),
        Suite::Timing => timing(a, task, &solvers),
    }
}

fn convergence(a: &BenchArgs, task: Task, solvers: &[Solver]) -> CliResult<usize> {
    let mut rows = Vec::new();
    for &seed in &a.seeds {
        let (data, preset) = match (&a.data, &a.synth) {
            (Some(path), _) => {
                let target: TargetColumn = a.target.parse()?;
                (standardize(&load_csv(path, !a.no_header, &target, task)?)?.0, false)
            }
            (None, Some(spec)) => (synthesize(spec, task, Some(seed))?.0, spec.trim_start().starts_with(ILL_CONDITIONED)),
            (None, None) if task == Task::BinaryClassification => (synthesize(ILL_CONDITIONED, task, Some(seed))?.0, true),
            (None, None) => (synthesize("n=200,p=50,noise=0.5", task, Some(seed))?.0, false),
        };
        let delta = resolve_delta(a.delta, preset, &data, a.norm, seed)?;
        let opts = SolveOptions { max_iter: a.max_iter, tol: a.tol, seed, ..Default::default() };
        for r in convergence_suite(&data, a.norm, delta, solvers, &opts)? {
            rows.push(SuboptimalityOut {
                solver: r.solver.to_string(),
                iter: r.iter,
                objective: r.objective,
                suboptimality: r.suboptimality,
                seconds: r.seconds,
                seed,
            });
        }
    }
    let count = rows.len();
    write_csv_rows(&a.out.join("suboptimality.csv"), rows)?;
    Ok(count)
}

fn timing(a: &BenchArgs, task: Task, solvers: &[Solver]) -> CliResult<usize> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes needs positive feature counts".into()));
    }
    let mut rows = Vec::new();
    for &seed in &a.seeds {
        let make = |p: usize| {
            let spec = SynthSpec { task, noise_sd: 0.5, seed, ..SynthSpec::new(Family::Isotropic, a.n, p) };
            generate(&spec).map(|(d, _)| d)
        };
        let delta = |d: &Dataset| resolve_delta(a.delta, false, d, a.norm, seed);
        let opts = SolveOptions { max_iter: a.max_iter, tol: a.tol, seed, ..Default::default() };
        for r in timing_suite(&a.sizes, solvers, a.reps, a.norm, delta, make, &opts)? {
            rows.push(TimingOut { size: r.size, solver: r.solver.to_string(), median_seconds: r.median_seconds, repetitions: r.repetitions, seed });
        }
    }
    let count = rows.len();
    write_csv_rows(&a.out.join("timing.csv"), rows)?;
    Ok(count)
}
