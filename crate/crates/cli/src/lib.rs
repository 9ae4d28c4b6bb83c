//! Experiment runner for the `azrbf` solvers: builds the shipped problems,
//! runs the AZ, dense and periodic solvers and writes one row per
//! `(size, solver)` as CSV or JSON.

pub mod args;
pub mod experiment;
pub mod output;
pub mod sizes;

use serde::Serialize;

pub use args::{Cli, Command, Format, RankTarget, SolverKind, SweepTarget};
pub use experiment::{
    run_problem, run_rankscan, scan_operators, Instance, ProblemArgs, ProfileRow, RankRow,
    ResultRow,
};
pub use output::{Destination, OUTPUT_DIR_ENV};
pub use sizes::SizeList;

use args::{OutputArgs, RankArgs, RunArgs};
use output::{emit, profile_path, resolve, to_csv, to_json};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] azrbf::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Results(Vec<ResultRow>),
    Ranks {
        rows: Vec<RankRow>,
        profiles: Vec<ProfileRow>,
    },
}

/// Execute a parsed command line, writing its output.
pub fn run(cli: &Cli) -> Result<(Outcome, Destination), CliError> {
    match &cli.command {
        Command::Approx1d(a) => single(a, "approx1d"),
        Command::Approx2d(a) => single(a, "approx2d"),
        Command::Ode(a) => single(a, "ode"),
        Command::Pde(a) => single(a, "pde"),
        Command::Sweep { target } => match target {
            SweepTarget::Approx1d(a) => sweep(a),
            SweepTarget::Approx2d(a) => sweep(a),
            SweepTarget::Ode(a) => sweep(a),
            SweepTarget::Pde(a) => sweep(a),
        },
        Command::Rankscan { target } => match target {
            RankTarget::Approx1d(a) => rankscan(a),
            RankTarget::Approx2d(a) => rankscan(a),
            RankTarget::Ode(a) => rankscan(a),
            RankTarget::Pde(a) => rankscan(a),
        },
    }
}

fn single<P: ProblemArgs + clap::Args>(
    args: &RunArgs<P>,
    name: &str,
) -> Result<(Outcome, Destination), CliError> {
    if args.problem.sizes()?.len() != 1 {
        return Err(CliError::Config(format!(
            "`{name}` runs a single size; use `azrbf sweep {name} ...` for size lists"
        )));
    }
    let rows = run_problem(args)?;
    let dest = write_rows(&rows, &args.out, name)?;
    Ok((Outcome::Results(rows), dest))
}

fn sweep<P: ProblemArgs + clap::Args>(
    args: &RunArgs<P>,
) -> Result<(Outcome, Destination), CliError> {
    let rows = run_problem(args)?;
    let dest = write_rows(&rows, &args.out, &format!("sweep_{}", P::NAME))?;
    Ok((Outcome::Results(rows), dest))
}

fn write_rows<T: Serialize>(
    rows: &[T],
    out: &OutputArgs,
    stem: &str,
) -> Result<Destination, CliError> {
    let (format, dest) = resolve(out, stem);
    let bytes = match format {
        Format::Csv => to_csv(rows)?,
        Format::Json => to_json(rows)?,
    };
    emit(&dest, &bytes)?;
    Ok(dest)
}

#[derive(Serialize)]
struct RankReport<'a> {
    ranks: &'a [RankRow],
    profiles: &'a [ProfileRow],
}

fn rankscan<P: ProblemArgs + clap::Args>(
    args: &RankArgs<P>,
) -> Result<(Outcome, Destination), CliError> {
    let (rows, profiles) = run_rankscan(args)?;
    let (format, dest) = resolve(&args.out, &format!("rankscan_{}", P::NAME));
    match format {
        Format::Json => emit(
            &dest,
            &to_json(&RankReport {
                ranks: &rows,
                profiles: &profiles,
            })?,
        )?,
        Format::Csv => {
            emit(&dest, &to_csv(&rows)?)?;
            // Profiles need a second table; on stdout only the ranks are shown.
            if let Destination::File(p) = &dest {
                emit(&Destination::File(profile_path(p)), &to_csv(&profiles)?)?;
            }
        }
    }
    Ok((Outcome::Ranks { rows, profiles }, dest))
}
