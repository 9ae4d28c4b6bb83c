//! Command-line definitions.

use std::path::PathBuf;

use azrbf::approx::ReferenceFn;
use azrbf::azcore::DEFAULT_SEED;
use azrbf::geometry::Domain;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::sizes::SizeList;

#[derive(Debug, Parser)]
#[command(
    name = "azrbf",
    version,
    about = "Gaussian RBF approximation and Helmholtz collocation with the AZ algorithm"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate a function on [-1, 1].
    Approx1d(RunArgs<Approx1dArgs>),
    /// Approximate a function on a 2D domain.
    Approx2d(RunArgs<Approx2dArgs>),
    /// Solve u'' + k² u = g on [-1, 1] with Dirichlet data.
    Ode(RunArgs<OdeArgs>),
    /// Solve Δu + k₀² u = g on a 2D domain.
    Pde(RunArgs<PdeArgs>),
    /// Run a problem over a range of sizes.
    Sweep {
        #[command(subcommand)]
        target: SweepTarget,
    },
    /// Report numerical ranks and singular value profiles of A and of the
    /// step-1 operator A - AZ*A.
    Rankscan {
        #[command(subcommand)]
        target: RankTarget,
    },
}

#[derive(Debug, Subcommand)]
pub enum SweepTarget {
    Approx1d(RunArgs<Approx1dArgs>),
    Approx2d(RunArgs<Approx2dArgs>),
    Ode(RunArgs<OdeArgs>),
    Pde(RunArgs<PdeArgs>),
}

#[derive(Debug, Subcommand)]
pub enum RankTarget {
    Approx1d(RankArgs<Approx1dArgs>),
    Approx2d(RankArgs<Approx2dArgs>),
    Ode(RankArgs<OdeArgs>),
    Pde(RankArgs<PdeArgs>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    /// Two-step AZ algorithm with a randomized first step.
    Az,
    /// Truncated SVD of the assembled matrix.
    Dense,
    /// The periodic pseudo-inverse alone, x = Z* b.
    Periodic,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Az => "az",
            Self::Dense => "dense",
            Self::Periodic => "periodic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; defaults to $AZRBF_OUTPUT_DIR/<command>.<format> when
    /// that variable is set, else standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format; inferred from the output extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Solver to run; repeat the flag to compare several.
    #[arg(long, value_enum, default_values_t = [SolverKind::Az])]
    pub solver: Vec<SolverKind>,
    /// Seed of the randomized sketch.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Relative singular value cutoff; defaults to max(τ₀², 1e-14).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Timed repetitions per solve; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs<P: Args> {
    #[command(flatten)]
    pub problem: P,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs<P: Args> {
    #[command(flatten)]
    pub problem: P,
    /// Relative singular value level; defaults to 1e-12 in 1D and τ₀ in 2D.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Probe vectors per operator; defaults to min(N, 200) in 1D and
    /// min(N, 1000) in 2D.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_fn(s: &str) -> Result<ReferenceFn, String> {
    ReferenceFn::by_name(s).map_err(|e| e.to_string())
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    Domain::by_name(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct Approx1dArgs {
    /// Number of centers (a size list in sweeps, e.g. 64:1024:x2).
    #[arg(long = "N", default_value = "256")]
    pub n: SizeList,
    /// Half-period of the periodization box.
    #[arg(long = "T", default_value_t = 1.5)]
    pub t: f64,
    /// Oversampling factor.
    #[arg(long = "s", default_value_t = 2)]
    pub s: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tau0: f64,
    /// Reference function: per1d or non1d.
    #[arg(long = "fn", value_parser = parse_fn, default_value = "non1d")]
    pub function: ReferenceFn,
}

#[derive(Debug, Clone, Args)]
pub struct Approx2dArgs {
    #[arg(long = "Nx", default_value = "100")]
    pub nx: SizeList,
    #[arg(long = "Ny", default_value = "50")]
    pub ny: SizeList,
    #[arg(long = "Tx", default_value_t = 1.4)]
    pub tx: f64,
    #[arg(long = "Ty", default_value_t = 0.7)]
    pub ty: f64,
    #[arg(long = "sx", default_value_t = 2)]
    pub sx: usize,
    #[arg(long = "sy", default_value_t = 2)]
    pub sy: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tau0: f64,
    /// Reference function: per2d or non2d.
    #[arg(long = "fn", value_parser = parse_fn, default_value = "non2d")]
    pub function: ReferenceFn,
    /// circle, ellipse or flower.
    #[arg(long, value_parser = parse_domain, default_value = "ellipse")]
    pub domain: Domain,
}

#[derive(Debug, Clone, Args)]
pub struct OdeArgs {
    #[arg(long = "N", default_value = "128")]
    pub n: SizeList,
    #[arg(long = "T", default_value_t = 1.5)]
    pub t: f64,
    #[arg(long = "s", default_value_t = 2)]
    pub s: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tau0: f64,
    /// k² of the operator; defaults to (N/5)², for which sin(Nx/5) solves
    /// the homogeneous equation.
    #[arg(long)]
    pub ksq: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PdeArgs {
    /// circle, ellipse or flower.
    #[arg(long, value_parser = parse_domain, default_value = "circle")]
    pub domain: Domain,
    #[arg(long = "Nx", default_value = "50")]
    pub nx: SizeList,
    #[arg(long = "Ny", default_value = "50")]
    pub ny: SizeList,
    /// Defaults: 1.5 (circle), 1.4 (ellipse), 1.0 (flower).
    #[arg(long = "Tx")]
    pub tx: Option<f64>,
    /// Defaults: 1.5 (circle), 0.7 (ellipse), 1.0 (flower).
    #[arg(long = "Ty")]
    pub ty: Option<f64>,
    #[arg(long = "sx", default_value_t = 2)]
    pub sx: usize,
    #[arg(long = "sy", default_value_t = 2)]
    pub sy: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tau0: f64,
    /// k₀²; defaults to 13 (4 on the flower).
    #[arg(long)]
    pub k0sq: Option<f64>,
    /// Boundary points; defaults to 100 (300 on the flower).
    #[arg(long = "Mb")]
    pub mb: Option<usize>,
}
