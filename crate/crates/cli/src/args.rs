use std::path::PathBuf;

use advtrain::{NormKind, Solver, Task};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "advtrain", version, about = "Adversarial training of linear models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model and write model.json, trace.csv and report.json.
    Train(TrainArgs),
    /// Re-run the training recorded in a model.json or report.json.
    Replay(ReplayArgs),
    /// Clean and worst-case metrics of a trained model on a dataset.
    Eval(EvalArgs),
    /// Convergence or timing sweeps written as CSV.
    Bench(BenchArgs),
    /// Generate a synthetic dataset with its true coefficients.
    Synth(SynthArgs),
    /// Default adversarial radius of a design matrix.
    Delta(DeltaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Reg,
    Clf,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Reg => Task::Regression,
            TaskArg::Clf => Task::BinaryClassification,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Convergence,
    Timing,
}

/// `default` or a non-negative radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaArg {
    Default,
    Value(f64),
}

pub fn parse_delta(s: &str) -> Result<DeltaArg, String> {
    if s == "default" {
        return Ok(DeltaArg::Default);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(DeltaArg::Value(v)),
        _ => Err(format!("expected `default` or a finite radius >= 0, got `{s}`")),
    }
}

pub fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse().map_err(|e: advtrain::Error| e.to_string())
}

pub fn parse_solver(s: &str) -> Result<Solver, String> {
    s.parse().map_err(|e: advtrain::Error| e.to_string())
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("expected a fraction in (0, 1), got `{s}`")),
    }
}

/// Input data: exactly one of a CSV file or a synthetic spec.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// CSV file with one sample per row.
    #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
    pub data: Option<PathBuf>,
    /// Synthetic spec, e.g. `family=sparse,n=200,p=50,s=5,seed=1` or `ill-conditioned`.
    #[arg(long)]
    pub synth: Option<String>,
    /// Target column: `last`, a 0-based index or a header name.
    #[arg(long, default_value = "last")]
    pub target: String,
    /// The CSV file has no header row.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    #[arg(long, value_parser = parse_norm, default_value = "linf")]
    pub norm: NormKind,
    #[arg(long, value_parser = parse_delta, default_value = "default")]
    pub delta: DeltaArg,
    /// Defaults to irrr for regression and agd for classification.
    #[arg(long, value_parser = parse_solver)]
    pub solver: Option<Solver>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Iterations, or epochs for stochastic solvers.
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed step size (initial step for the line search).
    #[arg(long)]
    pub step_size: Option<f64>,
    /// Hold out this fraction of the rows for test metrics.
    #[arg(long, value_parser = parse_fraction)]
    pub test_fraction: Option<f64>,
    /// Fit on the raw features instead of standardized ones.
    #[arg(long)]
    pub no_standardize: bool,
    /// Monte-Carlo draws for `--delta default`.
    #[arg(long, default_value_t = advtrain::attack::DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Echo the objective trace to stderr.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// A model.json or report.json written by `train`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "last")]
    pub target: String,
    #[arg(long)]
    pub no_header: bool,
    /// Attack radius used for the adversarial metrics.
    #[arg(long, default_value_t = 0.0)]
    pub delta_eval: f64,
    /// Attack norm; defaults to the training norm.
    #[arg(long, value_parser = parse_norm)]
    pub norm: Option<NormKind>,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, value_enum, default_value = "clf")]
    pub task: TaskArg,
    #[arg(long, value_parser = parse_norm, default_value = "linf")]
    pub norm: NormKind,
    /// Radius; defaults to the preset radius for the ill-conditioned preset
    /// and to the Monte-Carlo rule otherwise.
    #[arg(long, value_parser = parse_delta)]
    pub delta: Option<DeltaArg>,
    /// Comma-separated solver names.
    #[arg(long, value_delimiter = ',', value_parser = parse_solver)]
    pub solvers: Vec<Solver>,
    /// Convergence instance; defaults to the ill-conditioned preset for
    /// classification and an isotropic 200 x 50 model for regression.
    #[arg(long)]
    pub synth: Option<String>,
    /// Convergence instance from a CSV file instead.
    #[arg(long, conflicts_with = "synth")]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "last")]
    pub target: String,
    #[arg(long)]
    pub no_header: bool,
    /// Feature counts swept by the timing suite.
    #[arg(long, value_delimiter = ',', default_value = "30,100,300")]
    pub sizes: Vec<usize>,
    /// Samples per timing instance.
    #[arg(long, default_value_t = 504)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "isotropic")]
    pub family: String,
    #[arg(long, value_enum, default_value = "reg")]
    pub task: TaskArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub latent_dim: Option<usize>,
    #[arg(long)]
    pub sparsity: Option<usize>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DeltaArgs {
    #[arg(long, value_enum, default_value = "reg")]
    pub task: TaskArg,
    #[arg(long, value_parser = parse_norm, default_value = "linf")]
    pub norm: NormKind,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = advtrain::attack::DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = advtrain::attack::DEFAULT_PERCENTILE)]
    pub percentile: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_standardize: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn delta_values() {
        assert_eq!(parse_delta("default"), Ok(DeltaArg::Default));
        assert_eq!(parse_delta("0.25"), Ok(DeltaArg::Value(0.25)));
        assert!(parse_delta("-1").is_err() && parse_delta("inf").is_err() && parse_delta("x").is_err());
    }

    #[test]
    fn source_is_required_and_exclusive() {
        assert!(Cli::try_parse_from(["advtrain", "train", "--task", "reg"]).is_err());
        assert!(Cli::try_parse_from(["advtrain", "train", "--task", "reg", "--data", "a", "--synth", "n=1,p=1"]).is_err());
        let cli = Cli::try_parse_from(["advtrain", "train", "--task", "clf", "--synth", "ill-conditioned", "--solver", "saga"]).unwrap();
        match cli.command {
            Command::Train(a) => {
                assert_eq!(a.solver, Some(Solver::Saga));
                assert_eq!(a.delta, DeltaArg::Default);
                assert_eq!(a.norm, NormKind::Linf);
            }
            _ => unreachable!(),
        }
    }
}
