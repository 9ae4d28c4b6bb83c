//! Least-squares collocation for constant-coefficient Helmholtz problems.
//!
//! The system stacks interior rows `Aⁱ` (the operator applied to each
//! basis function at the interior collocation points) on boundary rows
//! `Aᵇ`. The interior block inherits the block-circulant structure with the
//! operator's symbol; the boundary block is small and dense. `Z*` is the
//! interior pseudo-inverse padded with zero columns for the boundary rows.
//!
//! Interior rows and data are divided by `-2ε²` (1D) or `-2εˣεʸ` (2D) so
//! that all entries are `O(1)`.

use std::sync::Arc;

use crate::approx::{ApproxConfig, AxisConfig, Discretization, Expansion};
use crate::azcore::{
    default_rank_1d, default_rank_2d, AZProblem, DenseMatrix, FnOperator, LinearOperator,
    ProblemKind, ProblemMeta,
};
use crate::circulant::{
    assemble_symbol, fourier_row, helmholtz_symbol_2d, BlockSymbol, CirculantOperator, C64,
};
use crate::error::{Error, Result};
use crate::geometry::{boundary_points, BoundaryPoint, Domain};
use crate::kernel::{Derivative, KernelSpec};

/// Type of boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    /// Prescribed value.
    Dirichlet,
    /// Prescribed outward normal derivative.
    Neumann,
}

type BoundaryData = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A boundary condition on one boundary component.
#[derive(Clone)]
pub struct BoundaryCondition {
    pub kind: BcKind,
    pub component: usize,
    pub data: BoundaryData,
}

impl std::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryCondition")
            .field("kind", &self.kind)
            .field("component", &self.component)
            .finish_non_exhaustive()
    }
}

impl BoundaryCondition {
    pub fn dirichlet(
        component: usize,
        data: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: BcKind::Dirichlet,
            component,
            data: Arc::new(data),
        }
    }

    pub fn neumann(
        component: usize,
        data: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: BcKind::Neumann,
            component,
            data: Arc::new(data),
        }
    }
}

/// A collocated boundary value problem ready for the AZ solver.
#[derive(Debug, Clone)]
pub struct BvpProblem {
    problem: AZProblem,
    disc: Discretization,
    boundary: Vec<BoundaryPoint>,
    boundary_rows: DenseMatrix,
    normalization: f64,
    wavenumber_sq: f64,
}

impl BvpProblem {
    pub fn problem(&self) -> &AZProblem {
        &self.problem
    }

    pub fn into_problem(self) -> AZProblem {
        self.problem
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    /// Number of coefficients.
    pub fn n(&self) -> usize {
        self.disc.n()
    }

    /// Interior rows.
    pub fn m(&self) -> usize {
        self.disc.m()
    }

    /// Boundary rows.
    pub fn mb(&self) -> usize {
        self.boundary.len()
    }

    pub fn boundary_points(&self) -> &[BoundaryPoint] {
        &self.boundary
    }

    /// The dense boundary block `Aᵇ`.
    pub fn boundary_rows(&self) -> &DenseMatrix {
        &self.boundary_rows
    }

    /// Factor dividing the interior rows and data.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `k²` (1D) or `k₀²` (2D).
    pub fn wavenumber_sq(&self) -> f64 {
        self.wavenumber_sq
    }

    pub fn expansion(&self, coefficients: Vec<f64>) -> Result<Expansion> {
        self.disc.expansion(coefficients)
    }
}

/// Boundary block in physical and Fourier form. Row `p` of the Fourier form
/// holds `Σ_j (Aᵇ)_pj e^{+2πi j·k/N}` so that `(1/N) Σ_k H_pk ŵ_k` is the
/// boundary value of the expansion with coefficient spectrum `ŵ`.
struct BoundaryBlock {
    rows: DenseMatrix,
    spectral: Vec<Vec<C64>>,
}

/// Physical-space and Fourier-side rows of one axis factor.
type AxisRows = (Vec<f64>, Vec<C64>);

fn boundary_axis_rows(spec: &KernelSpec, n: usize, x: f64, order: Derivative) -> AxisRows {
    let t = spec.half_period();
    let h = 2.0 * t / n as f64;
    let physical = (0..n)
        .map(|j| spec.periodized(x + t - j as f64 * h, order))
        .collect();
    (physical, fourier_row(spec, n, x, order))
}

fn boundary_block_1d(spec: &KernelSpec, n: usize, points: &[(BcKind, f64, f64)]) -> BoundaryBlock {
    let mut rows = DenseMatrix::zeros(points.len(), n);
    let mut spectral = Vec::with_capacity(points.len());
    for (p, &(kind, x, normal)) in points.iter().enumerate() {
        let (order, scale) = match kind {
            BcKind::Dirichlet => (Derivative::Value, 1.0),
            BcKind::Neumann => (Derivative::First, normal),
        };
        let (phys, four) = boundary_axis_rows(spec, n, x, order);
        for (j, v) in phys.into_iter().enumerate() {
            rows.set(p, j, scale * v);
        }
        spectral.push(four.into_iter().map(|v| v * scale).collect());
    }
    BoundaryBlock { rows, spectral }
}

fn boundary_block_2d(
    kx: &KernelSpec,
    nx: usize,
    ky: &KernelSpec,
    ny: usize,
    points: &[(BcKind, BoundaryPoint)],
) -> BoundaryBlock {
    let n = nx * ny;
    let mut rows = DenseMatrix::zeros(points.len(), n);
    let mut spectral = Vec::with_capacity(points.len());
    for (p, (kind, bp)) in points.iter().enumerate() {
        let (x0, fx0) = boundary_axis_rows(kx, nx, bp.x, Derivative::Value);
        let (y0, fy0) = boundary_axis_rows(ky, ny, bp.y, Derivative::Value);
        let mut terms: Vec<(f64, AxisRows, AxisRows)> = Vec::new();
        match kind {
            BcKind::Dirichlet => terms.push((1.0, (x0, fx0), (y0, fy0))),
            BcKind::Neumann => {
                let (x1, fx1) = boundary_axis_rows(kx, nx, bp.x, Derivative::First);
                let (y1, fy1) = boundary_axis_rows(ky, ny, bp.y, Derivative::First);
                terms.push((bp.normal.0, (x1, fx1), (y0.clone(), fy0.clone())));
                terms.push((bp.normal.1, (x0, fx0), (y1, fy1)));
            }
        }
        let mut four = vec![C64::default(); n];
        for (coef, (xr, fxr), (yr, fyr)) in &terms {
            for jx in 0..nx {
                let ax = coef * xr[jx];
                let fax = fxr[jx] * *coef;
                for jy in 0..ny {
                    let idx = jx * ny + jy;
                    rows.set(p, idx, rows.get(p, idx) + ax * yr[jy]);
                    four[idx] += fax * fyr[jy];
                }
            }
        }
        spectral.push(four);
    }
    BoundaryBlock { rows, spectral }
}

/// Assemble `[Aⁱ; Aᵇ]`, `[Zⁱ, 0]` and the fused `AZ*` from an interior
/// symbol and a boundary block.
fn assemble(
    disc: Discretization,
    symbol: BlockSymbol,
    block: BoundaryBlock,
    b: Vec<f64>,
    rank_estimate: usize,
    kind: ProblemKind,
) -> Result<(AZProblem, Discretization, DenseMatrix)> {
    let interior = disc.interior_operators(symbol)?;
    let (n, m) = (disc.n(), disc.m());
    let mb = block.rows.nrows();
    let total = m + mb;
    let rows = Arc::new(block.rows);
    let spectral = Arc::new(block.spectral);
    let sel = Arc::new(disc.selection().clone());
    let circ: Arc<CirculantOperator> = interior.circulant.clone();

    let (ai, ai_t, rows_a, rows_t) = (
        interior.a.clone(),
        interior.a.clone(),
        rows.clone(),
        rows.clone(),
    );
    let a = FnOperator::new(
        total,
        n,
        move |x| {
            let mut out = ai.apply(x);
            out.extend(rows_a.apply(x));
            out
        },
        move |y| {
            let mut out = ai_t.apply_adjoint(&y[..m]);
            for (o, v) in out.iter_mut().zip(rows_t.apply_adjoint(&y[m..])) {
                *o += v;
            }
            out
        },
    )
    .into_handle();

    let (zi, zi_t) = (interior.zstar.clone(), interior.zstar.clone());
    let zstar = FnOperator::new(
        n,
        total,
        move |y| zi.apply(&y[..m]),
        move |x| {
            let mut out = zi_t.apply_adjoint(x);
            out.resize(total, 0.0);
            out
        },
    )
    .into_handle();

    let (c1, s1, h1) = (circ.clone(), sel.clone(), spectral.clone());
    let (c2, s2, h2) = (circ, sel, spectral);
    let nf = n as f64;
    let az = FnOperator::new(
        total,
        total,
        move |y| {
            let w = c1.pinv_spectrum(&s1.extend(&y[..m])).expect("grid length");
            let mut out = s1.restrict(&c1.project_spectrum(&w));
            out.extend(
                h1.iter()
                    .map(|row| row.iter().zip(&w).map(|(h, v)| h * v).sum::<C64>().re / nf),
            );
            out
        },
        move |y| {
            let (yi, yb) = y.split_at(m);
            let mut spectrum = c2.pinv_spectrum(&s2.extend(yi)).expect("grid length");
            let mut top = s2.restrict(&c2.project_spectrum(&spectrum));
            spectrum.iter_mut().for_each(|v| *v = C64::default());
            for (row, &weight) in h2.iter().zip(yb) {
                for (acc, h) in spectrum.iter_mut().zip(row) {
                    *acc += h.conj() * weight;
                }
            }
            let from_boundary = s2.restrict(&c2.pinv_adjoint_spectrum(&spectrum));
            for (t, v) in top.iter_mut().zip(from_boundary) {
                *t += v;
            }
            top.resize(total, 0.0);
            top
        },
    )
    .into_handle();

    let meta = ProblemMeta {
        kind,
        tau0: disc.config().tau0,
        n,
        m,
        mb,
    };
    let problem = AZProblem::new(a, zstar, b, rank_estimate, meta)?.with_projector(az)?;
    let rows = Arc::try_unwrap(rows).unwrap_or_else(|r| (*r).clone());
    Ok((problem, disc, rows))
}

fn check_wavenumber(ksq: f64) -> Result<()> {
    if ksq.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "squared wavenumber must be finite, got {ksq}"
        )))
    }
}

/// Collocation of `u'' + k² u = g` on an interval with Dirichlet data
/// `u(lo) = h.0`, `u(hi) = h.1`.
pub fn build_ode_problem(
    cfg: &ApproxConfig,
    ksq: f64,
    rhs_g: impl Fn(f64) -> f64 + Sync,
    bc_values: (f64, f64),
) -> Result<BvpProblem> {
    check_wavenumber(ksq)?;
    let (lo, hi) = match cfg.domain {
        Domain::Interval { lo, hi } if cfg.dimension() == 1 => (lo, hi),
        _ => {
            return Err(Error::InvalidParameter(
                "the ODE solver needs a 1D configuration on an interval".into(),
            ))
        }
    };
    let disc = Discretization::new(cfg)?;
    let spec = *disc.kernel_x();
    let (n, s) = (cfg.x.n, cfg.x.s);
    let norm = -2.0 * spec.epsilon().powi(2);
    let b2 = assemble_symbol(&spec, n, s, Derivative::Second)?;
    let b0 = assemble_symbol(&spec, n, s, Derivative::Value)?;
    let symbol = BlockSymbol::linear_combination(&[(1.0 / norm, &b2), (ksq / norm, &b0)])?;

    let ends = [(BcKind::Dirichlet, lo, -1.0), (BcKind::Dirichlet, hi, 1.0)];
    let block = boundary_block_1d(&spec, n, &ends);
    let mut b = disc.sample(|x, _| rhs_g(x) / norm);
    b.extend([bc_values.0, bc_values.1]);
    let boundary = ends
        .iter()
        .enumerate()
        .map(|(i, &(_, x, nx))| BoundaryPoint {
            x,
            y: 0.0,
            normal: (nx, 0.0),
            component: i,
        })
        .collect();
    let rank = default_rank_1d(cfg.tau0)? + 2;
    let (problem, disc, rows) = assemble(disc, symbol, block, b, rank, ProblemKind::Ode)?;
    Ok(BvpProblem {
        problem,
        disc,
        boundary,
        boundary_rows: rows,
        normalization: norm,
        wavenumber_sq: ksq,
    })
}

/// Collocation of `Δu + k₀² u = g` on a 2D domain with `mb` boundary
/// points, each assigned the condition of its boundary component.
pub fn build_pde_problem(
    cfg: &ApproxConfig,
    k0sq: f64,
    bcs: &[BoundaryCondition],
    rhs_g: impl Fn(f64, f64) -> f64 + Sync,
    mb: usize,
) -> Result<BvpProblem> {
    check_wavenumber(k0sq)?;
    let ycfg = cfg
        .y
        .ok_or_else(|| Error::InvalidParameter("the PDE solver needs a 2D configuration".into()))?;
    let disc = Discretization::new(cfg)?;
    let points = boundary_points(&cfg.domain, mb)?;
    for (i, bc) in bcs.iter().enumerate() {
        if bcs[..i].iter().any(|o| o.component == bc.component) {
            return Err(Error::InvalidParameter(format!(
                "boundary component {} has more than one condition",
                bc.component
            )));
        }
    }
    let mut assigned = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        let bc = bcs
            .iter()
            .find(|bc| bc.component == p.component)
            .ok_or(Error::UnassignedBoundary { index })?;
        assigned.push((bc, *p));
    }

    let kx = *disc.kernel_x();
    let ky = *disc.kernel_y().expect("2D discretization");
    let norm = -2.0 * kx.epsilon() * ky.epsilon();
    let dims = cfg.dims();
    let symbol = helmholtz_symbol_2d(&kx, &ky, dims, k0sq)?
        .scaled(1.0 / norm)
        .to_block_symbol();

    let kinds: Vec<(BcKind, BoundaryPoint)> =
        assigned.iter().map(|(bc, p)| (bc.kind, *p)).collect();
    let block = boundary_block_2d(&kx, cfg.x.n, &ky, ycfg.n, &kinds);
    let mut b = disc.sample(|x, y| rhs_g(x, y) / norm);
    b.extend(assigned.iter().map(|(bc, p)| (bc.data)(p.x, p.y)));
    let rank = default_rank_2d(disc.n()) + points.len();
    let (problem, disc, rows) = assemble(disc, symbol, block, b, rank, ProblemKind::Pde)?;
    Ok(BvpProblem {
        problem,
        disc,
        boundary: points,
        boundary_rows: rows,
        normalization: norm,
        wavenumber_sq: k0sq,
    })
}

/// The 1D Helmholtz example `u'' + (N/5)² u = 0` on `[-1, 1]` with exact
/// solution `sin(Nx/5)`, in the box `T = 1.5` with `s = 2`.
pub fn ode_preset(n: usize) -> Result<BvpProblem> {
    let cfg = ApproxConfig::new_1d(n, 2, 1.5, 1e-10, Domain::unit_interval());
    let k = n as f64 / 5.0;
    build_ode_problem(&cfg, k * k, |_| 0.0, ((-k).sin(), k.sin()))
}

/// Exact solution of [`ode_preset`].
pub fn ode_preset_solution(n: usize) -> impl Fn(f64, f64) -> f64 + Send + Sync + Copy {
    let k = n as f64 / 5.0;
    move |x, _| (k * x).sin()
}

/// Configuration of the unit-circle Helmholtz example.
pub fn circle_config(nx: usize, ny: usize) -> ApproxConfig {
    ApproxConfig::new_2d(
        AxisConfig::new(nx, 2, 1.5),
        AxisConfig::new(ny, 2, 1.5),
        1e-5,
        Domain::circle(1.0),
    )
}

/// Exact solution `sin(2x + 3y)` of the circle example.
pub fn circle_solution(x: f64, y: f64) -> f64 {
    (2.0 * x + 3.0 * y).sin()
}

/// `Δu + 13u = 0` on the unit disk with Dirichlet data from
/// `sin(2x + 3y)` at `mb` boundary points.
pub fn circle_preset(nx: usize, ny: usize, mb: usize) -> Result<BvpProblem> {
    build_pde_problem(
        &circle_config(nx, ny),
        13.0,
        &[BoundaryCondition::dirichlet(0, circle_solution)],
        |_, _| 0.0,
        mb,
    )
}

/// Configuration of the flower example with `n × n` centers on
/// `[-1, 1)²`.
pub fn flower_config(n: usize) -> ApproxConfig {
    ApproxConfig::new_2d(
        AxisConfig::new(n, 2, 1.0),
        AxisConfig::new(n, 2, 1.0),
        1e-5,
        Domain::Flower,
    )
}

/// Source term of the flower example.
pub fn flower_source(x: f64, y: f64) -> f64 {
    (-4.0 * ((x + 0.3).powi(2) + y * y).powi(2)).exp()
}

/// `Δu + 4u = exp(-4((x+0.3)² + y²)²)` on the flower, homogeneous Neumann
/// on the outer curve and homogeneous Dirichlet on the hole, with `mb`
/// boundary points split two to one.
pub fn flower_preset(n: usize, mb: usize) -> Result<BvpProblem> {
    build_pde_problem(
        &flower_config(n),
        4.0,
        &[
            BoundaryCondition::neumann(0, |_, _| 0.0),
            BoundaryCondition::dirichlet(1, |_, _| 0.0),
        ],
        flower_source,
        mb,
    )
}
