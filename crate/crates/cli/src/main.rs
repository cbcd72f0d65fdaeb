use std::io::Write;
use std::process::ExitCode;

use ascover::commands::{run, Cli, Command};
use ascover::exit;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::BAD_INPUT as u8 } else { 0 });
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    // experiment writes its files itself and uses --out as a directory
    let to_file = !matches!(cli.command, Command::Experiment { .. });
    let written = match (&cli.out, to_file) {
        (Some(path), true) => std::fs::write(path, &outcome.body),
        _ => std::io::stdout().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: io: {e}");
        return ExitCode::from(exit::BAD_INPUT as u8);
    }
    match outcome.failure {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        None => ExitCode::SUCCESS,
    }
}
