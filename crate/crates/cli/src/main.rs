use std::process::ExitCode;

use azrbf_cli::{run, Cli, Destination, Outcome};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, dest)) => {
            if let Destination::File(path) = dest {
                let count = match &outcome {
                    Outcome::Results(rows) => rows.len(),
                    Outcome::Ranks { rows, .. } => rows.len(),
                };
                eprintln!("wrote {count} rows to {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
