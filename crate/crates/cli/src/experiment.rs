//! Problem instances, solver runs and result rows.

use std::sync::Arc;
use std::time::{Duration, Instant};

use azrbf::approx::{max_error, ApproxConfig, AxisConfig, Discretization, Expansion};
use azrbf::azcore::{
    az_solve, default_threshold, dense_tsvd_lsq, norm2, numerical_rank, residual_norm, to_dense,
    AZProblem, LinearOperator, SolverConfig, DENSE_COLUMN_LIMIT,
};
use azrbf::bvp::{build_ode_problem, build_pde_problem, flower_source, BoundaryCondition};
use azrbf::geometry::Domain;
use azrbf::kernel::Derivative;
use serde::{Deserialize, Serialize};

use crate::args::{
    Approx1dArgs, Approx2dArgs, OdeArgs, PdeArgs, RankArgs, RunArgs, SolveArgs, SolverKind,
};
use crate::CliError;

type Field = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// How the accuracy column of a row is measured.
#[derive(Clone)]
pub enum Check {
    /// Maximum deviation from a known solution on the probe grid.
    Reference(Field),
    /// Maximum pointwise residual `|Δu + k₀² u - g|` on the probe grid, for
    /// problems without a closed-form solution.
    HelmholtzResidual { k0sq: f64, source: Field },
}

/// A discretized problem ready to be solved.
#[derive(Clone)]
pub struct Instance {
    pub n: usize,
    pub m: usize,
    pub mb: usize,
    pub tau0: f64,
    pub problem: AZProblem,
    pub disc: Discretization,
    pub check: Check,
}

impl Instance {
    /// Accuracy of coefficients `x` according to [`Check`].
    pub fn max_error(&self, x: &[f64]) -> Result<f64, CliError> {
        let e = self.disc.expansion(x.to_vec())?;
        let probe = self.disc.probe_points();
        Ok(match &self.check {
            Check::Reference(f) => max_error(&e, f.as_ref(), &probe),
            Check::HelmholtzResidual { k0sq, source } => {
                helmholtz_residual(&e, *k0sq, source.as_ref(), &probe)
            }
        })
    }
}

fn helmholtz_residual(
    e: &Expansion,
    k0sq: f64,
    source: &(dyn Fn(f64, f64) -> f64 + Sync),
    probe: &[[f64; 2]],
) -> f64 {
    use Derivative::{Second, Value};
    probe
        .iter()
        .map(|&[x, y]| {
            let lap = e.evaluate_derivative_at(x, y, Second, Value)
                + e.evaluate_derivative_at(x, y, Value, Second);
            (lap + k0sq * e.evaluate_at(x, y) - source(x, y)).abs()
        })
        .fold(0.0, f64::max)
}

/// A problem family parameterized by its center counts.
pub trait ProblemArgs {
    const NAME: &'static str;

    /// Center counts `(Nx, Ny)` to run; `Ny = 1` in 1D.
    fn sizes(&self) -> Result<Vec<(usize, usize)>, CliError>;

    fn build(&self, size: (usize, usize)) -> Result<Instance, CliError>;

    fn dimension(&self) -> usize;

    fn tau0(&self) -> f64;
}

fn pair_sizes(
    nx: &crate::sizes::SizeList,
    ny: &crate::sizes::SizeList,
) -> Result<Vec<(usize, usize)>, CliError> {
    let (a, b) = (nx.values(), ny.values());
    match (a.len(), b.len()) {
        (x, y) if x == y => Ok(a.iter().copied().zip(b.iter().copied()).collect()),
        (1, _) => Ok(b.iter().map(|&v| (a[0], v)).collect()),
        (_, 1) => Ok(a.iter().map(|&v| (v, b[0])).collect()),
        (x, y) => Err(CliError::Config(format!(
            "--Nx has {x} values and --Ny has {y}; give lists of equal length or a single value for one axis"
        ))),
    }
}

impl ProblemArgs for Approx1dArgs {
    const NAME: &'static str = "approx1d";

    fn sizes(&self) -> Result<Vec<(usize, usize)>, CliError> {
        Ok(self.n.values().iter().map(|&n| (n, 1)).collect())
    }

    fn build(&self, (n, _): (usize, usize)) -> Result<Instance, CliError> {
        if self.function.dimension() != 1 {
            return Err(CliError::Config(format!(
                "--fn {} is a 2D function; approx1d takes per1d or non1d",
                self.function.name()
            )));
        }
        let cfg = ApproxConfig::new_1d(n, self.s, self.t, self.tau0, Domain::unit_interval());
        let disc = Discretization::new(&cfg)?;
        let f = self.function.bind(n, 1);
        let problem = disc.build_problem(&disc.sample(f))?;
        Ok(Instance {
            n,
            m: disc.m(),
            mb: 0,
            tau0: self.tau0,
            problem,
            disc,
            check: Check::Reference(Arc::new(f)),
        })
    }

    fn dimension(&self) -> usize {
        1
    }

    fn tau0(&self) -> f64 {
        self.tau0
    }
}

impl ProblemArgs for Approx2dArgs {
    const NAME: &'static str = "approx2d";

    fn sizes(&self) -> Result<Vec<(usize, usize)>, CliError> {
        pair_sizes(&self.nx, &self.ny)
    }

    fn build(&self, (nx, ny): (usize, usize)) -> Result<Instance, CliError> {
        if self.function.dimension() != 2 {
            return Err(CliError::Config(format!(
                "--fn {} is a 1D function; approx2d takes per2d or non2d",
                self.function.name()
            )));
        }
        if self.domain.dimension() != 2 {
            return Err(CliError::Config(
                "approx2d needs a 2D domain (circle, ellipse or flower)".into(),
            ));
        }
        let cfg = ApproxConfig::new_2d(
            AxisConfig::new(nx, self.sx, self.tx),
            AxisConfig::new(ny, self.sy, self.ty),
            self.tau0,
            self.domain,
        );
        let disc = Discretization::new(&cfg)?;
        let f = self.function.bind(nx, ny);
        let problem = disc.build_problem(&disc.sample(f))?;
        Ok(Instance {
            n: nx * ny,
            m: disc.m(),
            mb: 0,
            tau0: self.tau0,
            problem,
            disc,
            check: Check::Reference(Arc::new(f)),
        })
    }

    fn dimension(&self) -> usize {
        2
    }

    fn tau0(&self) -> f64 {
        self.tau0
    }
}

impl ProblemArgs for OdeArgs {
    const NAME: &'static str = "ode";

    fn sizes(&self) -> Result<Vec<(usize, usize)>, CliError> {
        Ok(self.n.values().iter().map(|&n| (n, 1)).collect())
    }

    /// Manufactured problem with solution `sin(Nx/5)`.
    fn build(&self, (n, _): (usize, usize)) -> Result<Instance, CliError> {
        let k = n as f64 / 5.0;
        let ksq = self.ksq.unwrap_or(k * k);
        let cfg = ApproxConfig::new_1d(n, self.s, self.t, self.tau0, Domain::unit_interval());
        let g = move |x: f64| (ksq - k * k) * (k * x).sin();
        let bvp = build_ode_problem(&cfg, ksq, g, ((-k).sin(), k.sin()))?;
        Ok(Instance {
            n,
            m: bvp.m(),
            mb: bvp.mb(),
            tau0: self.tau0,
            problem: bvp.problem().clone(),
            disc: bvp.discretization().clone(),
            check: Check::Reference(Arc::new(move |x, _| (k * x).sin())),
        })
    }

    fn dimension(&self) -> usize {
        1
    }

    fn tau0(&self) -> f64 {
        self.tau0
    }
}

impl ProblemArgs for PdeArgs {
    const NAME: &'static str = "pde";

    fn sizes(&self) -> Result<Vec<(usize, usize)>, CliError> {
        pair_sizes(&self.nx, &self.ny)
    }

    /// The flower uses its fixed source and boundary conditions; other
    /// domains use the manufactured solution `sin(2x + 3y)` with Dirichlet
    /// data on every boundary component.
    fn build(&self, (nx, ny): (usize, usize)) -> Result<Instance, CliError> {
        let (dtx, dty, dk, dmb) =
            match self.domain {
                Domain::Flower => (1.0, 1.0, 4.0, 300),
                Domain::Ellipse { a, b } if a != b => (1.4, 0.7, 13.0, 100),
                Domain::Interval { .. } => return Err(CliError::Config(
                    "pde needs a 2D domain (circle, ellipse or flower); use `ode` for intervals"
                        .into(),
                )),
                _ => (1.5, 1.5, 13.0, 100),
            };
        let k0sq = self.k0sq.unwrap_or(dk);
        let mb = self.mb.unwrap_or(dmb);
        let cfg = ApproxConfig::new_2d(
            AxisConfig::new(nx, self.sx, self.tx.unwrap_or(dtx)),
            AxisConfig::new(ny, self.sy, self.ty.unwrap_or(dty)),
            self.tau0,
            self.domain,
        );
        let (bvp, check) = if self.domain == Domain::Flower {
            let bcs = [
                BoundaryCondition::neumann(0, |_, _| 0.0),
                BoundaryCondition::dirichlet(1, |_, _| 0.0),
            ];
            let bvp = build_pde_problem(&cfg, k0sq, &bcs, flower_source, mb)?;
            let check = Check::HelmholtzResidual {
                k0sq,
                source: Arc::new(flower_source),
            };
            (bvp, check)
        } else {
            let u = |x: f64, y: f64| (2.0 * x + 3.0 * y).sin();
            let bcs: Vec<BoundaryCondition> = (0..self.domain.boundary_components())
                .map(|c| BoundaryCondition::dirichlet(c, u))
                .collect();
            let g = move |x: f64, y: f64| (k0sq - 13.0) * u(x, y);
            let bvp = build_pde_problem(&cfg, k0sq, &bcs, g, mb)?;
            (bvp, Check::Reference(Arc::new(u)))
        };
        Ok(Instance {
            n: nx * ny,
            m: bvp.m(),
            mb: bvp.mb(),
            tau0: self.tau0,
            problem: bvp.problem().clone(),
            disc: bvp.discretization().clone(),
            check,
        })
    }

    fn dimension(&self) -> usize {
        2
    }

    fn tau0(&self) -> f64 {
        self.tau0
    }
}

/// One line of solver output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "Mb")]
    pub mb: usize,
    pub max_error: f64,
    /// `‖Ax - b‖` of the assembled (normalized) system.
    pub residual: f64,
    /// `‖x‖ / √N`.
    pub coef_norm_scaled: f64,
    /// Rank kept in step 1 of the AZ solver; 0 for the other solvers.
    pub step1_rank: usize,
    pub time_seconds: f64,
    pub solver: String,
    pub seed: u64,
}

/// Coefficients of one solve with its best wall time.
pub struct Solved {
    pub x: Vec<f64>,
    pub step1_rank: usize,
    pub time: Duration,
}

pub fn solve(inst: &Instance, solver: SolverKind, args: &SolveArgs) -> Result<Solved, CliError> {
    if solver == SolverKind::Dense && inst.n > DENSE_COLUMN_LIMIT {
        return Err(CliError::Config(format!(
            "the dense solver is limited to {DENSE_COLUMN_LIMIT} coefficients, this problem has {}; use --solver az",
            inst.n
        )));
    }
    let threshold = args
        .threshold
        .unwrap_or_else(|| default_threshold(inst.tau0));
    let p = &inst.problem;
    let mut best: Option<Solved> = None;
    for _ in 0..args.repeats.max(1) {
        let start = Instant::now();
        let (x, step1_rank) = match solver {
            SolverKind::Az => {
                let cfg = SolverConfig {
                    threshold: Some(threshold),
                    ..SolverConfig::with_seed(args.seed)
                };
                let rep = az_solve(p, &cfg)?;
                (rep.solution, rep.step1_rank)
            }
            SolverKind::Dense => {
                let a = to_dense(p.a().as_ref())?;
                (dense_tsvd_lsq(&a, p.b(), threshold)?, 0)
            }
            SolverKind::Periodic => (p.zstar().apply(p.b()), 0),
        };
        let time = start.elapsed();
        if best.as_ref().is_none_or(|b| time < b.time) {
            best = Some(Solved {
                x,
                step1_rank,
                time,
            });
        }
    }
    Ok(best.expect("at least one repetition"))
}

pub fn result_row(
    inst: &Instance,
    solver: SolverKind,
    solved: &Solved,
    seed: u64,
) -> Result<ResultRow, CliError> {
    let p = &inst.problem;
    Ok(ResultRow {
        n: inst.n,
        m: inst.m,
        mb: inst.mb,
        max_error: inst.max_error(&solved.x)?,
        residual: residual_norm(p.a().as_ref(), &solved.x, p.b())?,
        coef_norm_scaled: norm2(&solved.x) / (inst.n as f64).sqrt(),
        step1_rank: solved.step1_rank,
        time_seconds: solved.time.as_secs_f64().max(1e-9),
        solver: solver.name().to_string(),
        seed,
    })
}

/// Solve every size with every requested solver.
pub fn run_problem<P: ProblemArgs + clap::Args>(
    args: &RunArgs<P>,
) -> Result<Vec<ResultRow>, CliError> {
    if args.solve.solver.is_empty() {
        return Err(CliError::Config("no solver selected".into()));
    }
    let mut rows = Vec::new();
    for size in args.problem.sizes()? {
        let inst = args.problem.build(size)?;
        for &solver in &args.solve.solver {
            let solved = solve(&inst, solver, &args.solve)?;
            rows.push(result_row(&inst, solver, &solved, args.solve.seed)?);
        }
    }
    Ok(rows)
}

/// Ranks of `A` and of the step-1 operator at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "Mb")]
    pub mb: usize,
    pub rank_a: usize,
    pub rank_step1: usize,
    pub delta: f64,
    pub budget: usize,
    /// A count reached the probe budget, so the true rank may be larger.
    pub saturated: bool,
}

/// One singular value of a sketched operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    #[serde(rename = "N")]
    pub n: usize,
    /// `A` or `step1`.
    pub operator: String,
    pub index: usize,
    pub sigma: f64,
}

/// Rank and singular value profile of `a` and `step1`.
#[allow(clippy::too_many_arguments)]
pub fn scan_operators(
    n: usize,
    m: usize,
    mb: usize,
    a: &dyn LinearOperator,
    step1: &dyn LinearOperator,
    delta: f64,
    budget: usize,
    seed: u64,
) -> Result<(RankRow, Vec<ProfileRow>), CliError> {
    let ra = numerical_rank(a, delta, budget, seed)?;
    let rs = numerical_rank(step1, delta, budget, seed)?;
    let mut profile = Vec::new();
    for (name, est) in [("A", &ra), ("step1", &rs)] {
        profile.extend(
            est.singular_values
                .iter()
                .enumerate()
                .map(|(i, &s)| ProfileRow {
                    n,
                    operator: name.to_string(),
                    index: i,
                    sigma: s,
                }),
        );
    }
    let row = RankRow {
        n,
        m,
        mb,
        rank_a: ra.rank,
        rank_step1: rs.rank,
        delta,
        budget: ra.budget.max(rs.budget),
        saturated: ra.saturated || rs.saturated,
    };
    Ok((row, profile))
}

pub fn run_rankscan<P: ProblemArgs + clap::Args>(
    args: &RankArgs<P>,
) -> Result<(Vec<RankRow>, Vec<ProfileRow>), CliError> {
    let p = &args.problem;
    let delta = args
        .delta
        .unwrap_or(if p.dimension() == 1 { 1e-12 } else { p.tau0() });
    let mut rows = Vec::new();
    let mut profiles = Vec::new();
    for size in p.sizes()? {
        let inst = p.build(size)?;
        let cap = if p.dimension() == 1 { 200 } else { 1000 };
        let budget = args.budget.unwrap_or(inst.n.min(cap));
        let step1 = inst.problem.step1_operator();
        let (row, prof) = scan_operators(
            inst.n,
            inst.m,
            inst.mb,
            inst.problem.a().as_ref(),
            step1.as_ref(),
            delta,
            budget,
            args.seed,
        )?;
        rows.push(row);
        profiles.extend(prof);
    }
    Ok((rows, profiles))
}
