use std::io::Write;
use std::process::ExitCode;

use advtrain_cli::args::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match advtrain_cli::run(cli) {
        Ok(out) => {
            // A closed pipe downstream is not a failure of the command.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("advtrain: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
