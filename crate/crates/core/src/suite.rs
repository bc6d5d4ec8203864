//! Benchmark sweeps: suboptimality traces against a reference optimum, and
//! wall-clock timing over problem sizes.

use std::time::Instant;

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::fit::SolveOptions;
use crate::norm::NormKind;
use crate::solver::{fit, Solver};

/// One point of a suboptimality curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SuboptimalityRow {
    pub solver: Solver,
    /// Iteration, or epoch for stochastic solvers.
    pub iter: usize,
    pub objective: f64,
    pub suboptimality: f64,
    pub seconds: f64,
}

/// Reference optimum: the best objective of a tight-tolerance AGD (or IRRR)
/// run and of every traced point of the compared solvers.
pub fn reference_objective(data: &Dataset, norm: NormKind, delta: f64, seed: u64) -> Result<f64> {
    let (solver, max_iter) = match data.task() {
        Task::Regression => (Solver::Irrr, 20_000),
        Task::BinaryClassification => (Solver::Agd, 100_000),
    };
    let opts = SolveOptions { max_iter, tol: 1e-15, seed, record_trace: false, ..Default::default() };
    Ok(fit(data, norm, delta, solver, &opts)?.objective)
}

/// Runs every solver with `opts` and reports `f_k - f*` along its trace.
/// Suboptimality is clamped at zero and `f*` is lowered to any value a solver
/// attains below the reference run.
pub fn convergence_suite(
    data: &Dataset,
    norm: NormKind,
    delta: f64,
    solvers: &[Solver],
    opts: &SolveOptions,
) -> Result<Vec<SuboptimalityRow>> {
    let mut reference = reference_objective(data, norm, delta, opts.seed)?;
    let opts = SolveOptions { record_trace: true, ..opts.clone() };
    let mut runs = Vec::with_capacity(solvers.len());
    for &s in solvers {
        let r = fit(data, norm, delta, s, &opts)?;
        reference = r.trace.iter().map(|t| t.objective).fold(reference, f64::min);
        runs.push((s, r));
    }
    Ok(runs
        .into_iter()
        .flat_map(|(solver, r)| {
            r.trace.into_iter().map(move |t| SuboptimalityRow {
                solver,
                iter: t.iter,
                objective: t.objective,
                suboptimality: (t.objective - reference).max(0.0),
                seconds: t.seconds,
            })
        })
        .collect())
}

/// First iteration at which a solver's suboptimality drops to `level`.
pub fn iterations_to(rows: &[SuboptimalityRow], solver: Solver, level: f64) -> Option<usize> {
    rows.iter().filter(|r| r.solver == solver).find(|r| r.suboptimality <= level).map(|r| r.iter)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub size: usize,
    pub solver: Solver,
    pub median_seconds: f64,
    pub repetitions: usize,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Times every `(size, solver)` cell `repetitions` times on the dataset built
/// by `make(size)` and reports the median wall time.
pub fn timing_suite(
    sizes: &[usize],
    solvers: &[Solver],
    repetitions: usize,
    norm: NormKind,
    delta: impl Fn(&Dataset) -> Result<f64>,
    make: impl Fn(usize) -> Result<Dataset>,
    opts: &SolveOptions,
) -> Result<Vec<TimingRow>> {
    if repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be at least 1".into()));
    }
    let opts = SolveOptions { record_trace: false, ..opts.clone() };
    let mut rows = Vec::with_capacity(sizes.len() * solvers.len());
    for &size in sizes {
        let data = make(size)?;
        let d = delta(&data)?;
        for &solver in solvers {
            let mut times: Vec<f64> = (0..repetitions)
                .map(|_| {
                    let start = Instant::now();
                    fit(&data, norm, d, solver, &opts).map(|_| start.elapsed().as_secs_f64())
                })
                .collect::<Result<_>>()?;
            rows.push(TimingRow { size, solver, median_seconds: median(&mut times), repetitions });
        }
    }
    Ok(rows)
}
