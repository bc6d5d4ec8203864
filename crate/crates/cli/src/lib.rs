//! Command-line front end of the `advtrain` solvers: training, evaluation
//! under attack, default radii, synthetic data and benchmark sweeps.
//!
//! Exit status: 0 on success, 2 for usage errors, 3 for data errors and 4
//! for numerical failures.

pub mod args;
pub mod bench;
pub mod error;
pub mod eval;
pub mod metrics;
mod output;
pub mod source;
pub mod synth;
pub mod train;

use args::{Cli, Command};
pub use error::{CliError, CliResult};

/// Runs one subcommand and returns what it prints on stdout.
pub fn run(cli: Cli) -> CliResult<String> {
    let json = |v: serde_json::Value| serde_json::to_string_pretty(&v).expect("json values serialize");
    match cli.command {
        Command::Train(a) => Ok(json(serde_json::to_value(train::cmd_train(&a)?).expect("report serializes"))),
        Command::Replay(a) => Ok(json(serde_json::to_value(train::cmd_replay(&a.report, &a.out)?).expect("report serializes"))),
        Command::Eval(a) => Ok(json(serde_json::to_value(eval::cmd_eval(&a)?).expect("report serializes"))),
        Command::Bench(a) => {
            let rows = bench::cmd_bench(&a)?;
            Ok(json(serde_json::json!({ "rows": rows, "out": a.out.display().to_string() })))
        }
        Command::Synth(a) => Ok(json(synth::cmd_synth(&a)?)),
        Command::Delta(a) => Ok(json(synth::cmd_delta(&a)?)),
    }
}
