//! Non-periodic approximation problems on domains embedded in a periodic
//! box, expansion evaluation and error measurement.
//!
//! The fast operators are
//!
//! - `A = R Aᶜ`: coefficients to values at the collocation points inside
//!   the domain,
//! - `Z* = (Aᶜ)† E`: zero-extend data to the full grid, then apply the
//!   periodic pseudo-inverse,
//! - `AZ* = R Aᶜ(Aᶜ)† E`, evaluated in the Fourier domain.

use std::sync::Arc;

use rayon::prelude::*;

use crate::azcore::{
    default_rank_1d, default_rank_2d, AZProblem, FnOperator, OperatorHandle, ProblemKind,
    ProblemMeta,
};
use crate::circulant::{assemble_symbol, BlockSymbol, CirculantOperator, TensorSymbol};
use crate::error::{check_len, Error, Result};
use crate::geometry::{Domain, IndexSelection};
use crate::kernel::{Derivative, KernelSpec};

/// Centers, oversampling and half-period along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisConfig {
    pub n: usize,
    pub s: usize,
    pub half_period: f64,
}

impl AxisConfig {
    pub fn new(n: usize, s: usize, half_period: f64) -> Self {
        Self { n, s, half_period }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least two centers per axis, got {}",
                self.n
            )));
        }
        if self.s < 1 {
            return Err(Error::InvalidParameter(
                "oversampling factor must be at least 1".into(),
            ));
        }
        if !(self.half_period > 0.0 && self.half_period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half-period must be positive, got {}",
                self.half_period
            )));
        }
        Ok(())
    }

    /// Spacing of the centers.
    pub fn center_spacing(&self) -> f64 {
        2.0 * self.half_period / self.n as f64
    }

    /// Spacing of the oversampled collocation grid.
    pub fn grid_spacing(&self) -> f64 {
        self.center_spacing() / self.s as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        -self.half_period + j as f64 * self.center_spacing()
    }

    /// Grid point `k` of shifted grid `i`.
    pub fn grid_point(&self, i: usize, k: usize) -> f64 {
        -self.half_period + i as f64 * self.grid_spacing() + k as f64 * self.center_spacing()
    }
}

/// Discretization parameters of an approximation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    pub x: AxisConfig,
    /// Second axis; `None` for 1D problems.
    pub y: Option<AxisConfig>,
    pub tau0: f64,
    pub domain: Domain,
}

/// Default threshold for 1D problems.
pub const DEFAULT_TAU0_1D: f64 = 1e-10;
/// Default threshold for 2D problems.
pub const DEFAULT_TAU0_2D: f64 = 1e-5;

impl ApproxConfig {
    pub fn new_1d(n: usize, s: usize, half_period: f64, tau0: f64, domain: Domain) -> Self {
        Self {
            x: AxisConfig::new(n, s, half_period),
            y: None,
            tau0,
            domain,
        }
    }

    pub fn new_2d(x: AxisConfig, y: AxisConfig, tau0: f64, domain: Domain) -> Self {
        Self {
            x,
            y: Some(y),
            tau0,
            domain,
        }
    }

    /// The ellipse `x² + 4y² <= 1` in the box `[-1.4, 1.4) × [-0.7, 0.7)`
    /// with 100 × 50 centers.
    pub fn ellipse_preset() -> Self {
        Self::new_2d(
            AxisConfig::new(100, 2, 1.4),
            AxisConfig::new(50, 2, 0.7),
            DEFAULT_TAU0_2D,
            Domain::Ellipse { a: 1.0, b: 0.5 },
        )
    }

    pub fn dimension(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    /// `(nx, ny, sx, sy)`, with `ny = sy = 1` in 1D.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        let (ny, sy) = self.y.map_or((1, 1), |a| (a.n, a.s));
        (self.x.n, ny, self.x.s, sy)
    }

    /// Number of coefficients.
    pub fn n_total(&self) -> usize {
        let (nx, ny, _, _) = self.dims();
        nx * ny
    }

    /// Number of points of the full oversampled grid.
    pub fn full_len(&self) -> usize {
        let (nx, ny, sx, sy) = self.dims();
        nx * ny * sx * sy
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        if let Some(y) = &self.y {
            y.validate()?;
        }
        if !(self.tau0 > 0.0 && self.tau0 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau0 must lie in (0, 1), got {}",
                self.tau0
            )));
        }
        if self.domain.dimension() != self.dimension() {
            return Err(Error::InvalidParameter(format!(
                "a {}D configuration needs a {}D domain",
                self.dimension(),
                self.dimension()
            )));
        }
        let (ex, ey) = self.domain.extent();
        let tol = 1e-12;
        let ty = self.y.map_or(f64::INFINITY, |a| a.half_period);
        if ex > self.x.half_period + tol || ey > ty + tol {
            return Err(Error::InvalidParameter(format!(
                "domain with half-extent ({ex}, {ey}) does not fit the box"
            )));
        }
        Ok(())
    }

    pub fn kernels(&self) -> Result<(KernelSpec, Option<KernelSpec>)> {
        let kx = KernelSpec::linear_regime(self.x.n, self.x.half_period, self.tau0)?;
        let ky = match &self.y {
            Some(y) => Some(KernelSpec::linear_regime(y.n, y.half_period, self.tau0)?),
            None => None,
        };
        Ok((kx, ky))
    }
}

/// Grids, kernels and interior selection of an [`ApproxConfig`].
///
/// The full grid is numbered in block order: in 1D, point `k` of shifted
/// grid `i` has index `i·N + k`; in 2D, index `(ix·Nx + kx)·Ly + iy·Ny + ky`
/// with `Ly = sy·Ny`.
#[derive(Debug, Clone)]
pub struct Discretization {
    cfg: ApproxConfig,
    kx: KernelSpec,
    ky: Option<KernelSpec>,
    selection: IndexSelection,
    points: Vec<[f64; 2]>,
}

impl Discretization {
    pub fn new(cfg: &ApproxConfig) -> Result<Self> {
        cfg.validate()?;
        let (kx, ky) = cfg.kernels()?;
        let full = cfg.full_len();
        let kept: Vec<usize> = (0..full)
            .filter(|&f| {
                let [x, y] = full_point(cfg, f);
                cfg.domain.contains(x, y)
            })
            .collect();
        let selection = IndexSelection::new(full, kept)?;
        let n = cfg.n_total();
        if selection.len() <= n {
            return Err(Error::InsufficientOversampling {
                rows: selection.len(),
                cols: n,
            });
        }
        if let Some(y) = &cfg.y {
            let box_area = 4.0 * cfg.x.half_period * y.half_period;
            let ratio = box_area / cfg.domain.measure();
            if ((cfg.x.s * y.s) as f64) <= ratio {
                return Err(Error::InvalidParameter(format!(
                    "oversampling sx·sy = {} must exceed the box-to-domain area ratio {ratio:.3}",
                    cfg.x.s * y.s
                )));
            }
        }
        let points = selection
            .kept()
            .iter()
            .map(|&f| full_point(cfg, f))
            .collect();
        Ok(Self {
            cfg: *cfg,
            kx,
            ky,
            selection,
            points,
        })
    }

    pub fn config(&self) -> &ApproxConfig {
        &self.cfg
    }

    pub fn kernel_x(&self) -> &KernelSpec {
        &self.kx
    }

    pub fn kernel_y(&self) -> Option<&KernelSpec> {
        self.ky.as_ref()
    }

    pub fn selection(&self) -> &IndexSelection {
        &self.selection
    }

    /// Collocation points inside the domain (`y = 0` in 1D).
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Number of coefficients.
    pub fn n(&self) -> usize {
        self.cfg.n_total()
    }

    /// Number of interior collocation points.
    pub fn m(&self) -> usize {
        self.selection.len()
    }

    pub fn full_point(&self, f: usize) -> [f64; 2] {
        full_point(&self.cfg, f)
    }

    /// Block symbol of plain function values.
    pub fn value_symbol(&self) -> Result<BlockSymbol> {
        let (nx, ny, sx, sy) = self.cfg.dims();
        let x0 = assemble_symbol(&self.kx, nx, sx, Derivative::Value)?;
        match &self.ky {
            None => Ok(x0),
            Some(ky) => {
                let y0 = assemble_symbol(ky, ny, sy, Derivative::Value)?;
                Ok(TensorSymbol::product(x0, y0)?.to_block_symbol())
            }
        }
    }

    /// Restricted fast operators `A`, `Z*` and `AZ*` for a symbol on this
    /// discretization's grid.
    pub fn interior_operators(&self, symbol: BlockSymbol) -> Result<InteriorOperators> {
        if symbol.dims() != self.cfg.dims() {
            return Err(Error::InvalidParameter(
                "symbol dimensions differ from the discretization".into(),
            ));
        }
        let circ = Arc::new(CirculantOperator::new(symbol)?);
        let sel = Arc::new(self.selection.clone());
        let (n, m) = (self.n(), self.m());

        let (c1, s1, c2, s2) = (circ.clone(), sel.clone(), circ.clone(), sel.clone());
        let a = FnOperator::new(
            m,
            n,
            move |x| s1.restrict(&c1.forward(x).expect("coefficient length")),
            move |y| c2.forward_adjoint(&s2.extend(y)).expect("grid length"),
        )
        .into_handle();

        let (c1, s1, c2, s2) = (circ.clone(), sel.clone(), circ.clone(), sel.clone());
        let zstar = FnOperator::new(
            n,
            m,
            move |y| c1.pinv(&s1.extend(y)).expect("grid length"),
            move |x| s2.restrict(&c2.pinv_adjoint(x).expect("coefficient length")),
        )
        .into_handle();

        let (c1, s1, c2, s2) = (circ.clone(), sel.clone(), circ.clone(), sel);
        let az = FnOperator::new(
            m,
            m,
            move |y| s1.restrict(&c1.projector(&s1.extend(y)).expect("grid length")),
            move |y| s2.restrict(&c2.projector(&s2.extend(y)).expect("grid length")),
        )
        .into_handle();

        Ok(InteriorOperators {
            a,
            zstar,
            az,
            circulant: circ,
        })
    }

    /// Approximation problem `A a ≈ samples`.
    pub fn build_problem(&self, samples: &[f64]) -> Result<AZProblem> {
        check_len("samples", self.m(), samples.len())?;
        let ops = self.interior_operators(self.value_symbol()?)?;
        let (kind, rank) = match self.cfg.dimension() {
            1 => (ProblemKind::Approx1d, default_rank_1d(self.cfg.tau0)?),
            _ => (ProblemKind::Approx2d, default_rank_2d(self.n())),
        };
        let meta = ProblemMeta {
            kind,
            tau0: self.cfg.tau0,
            n: self.n(),
            m: self.m(),
            mb: 0,
        };
        AZProblem::new(ops.a, ops.zstar, samples.to_vec(), rank, meta)?.with_projector(ops.az)
    }

    /// Samples of `f` at the collocation points.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        self.points.par_iter().map(|&[x, y]| f(x, y)).collect()
    }

    pub fn expansion(&self, coefficients: Vec<f64>) -> Result<Expansion> {
        let (nx, ny, _, _) = self.cfg.dims();
        match &self.ky {
            None => Expansion::new_1d(coefficients, self.kx, nx),
            Some(ky) => Expansion::new_2d(coefficients, (self.kx, nx), (*ky, ny)),
        }
    }

    /// Equispaced error probe points inside the domain: `10·L` points in
    /// 1D, a `3Lx × 3Ly` grid in 2D.
    pub fn probe_points(&self) -> Vec<[f64; 2]> {
        probe_points(&self.cfg)
    }
}

fn full_point(cfg: &ApproxConfig, f: usize) -> [f64; 2] {
    let (nx, ny, _, sy) = cfg.dims();
    let ly = sy * ny;
    let (p, q) = (f / ly, f % ly);
    let x = cfg.x.grid_point(p / nx, p % nx);
    let y = cfg.y.map_or(0.0, |a| a.grid_point(q / ny, q % ny));
    [x, y]
}

/// The fast operators of an interior collocation block.
#[derive(Clone)]
pub struct InteriorOperators {
    pub a: OperatorHandle,
    pub zstar: OperatorHandle,
    /// `AZ*`, computed without leaving the Fourier domain.
    pub az: OperatorHandle,
    pub circulant: Arc<CirculantOperator>,
}

/// 1D approximation problem for samples at the kept collocation points.
pub fn build_approx_problem_1d(cfg: &ApproxConfig, samples: &[f64]) -> Result<AZProblem> {
    if cfg.dimension() != 1 {
        return Err(Error::InvalidParameter(
            "expected a 1D configuration".into(),
        ));
    }
    Discretization::new(cfg)?.build_problem(samples)
}

/// 2D approximation problem for samples at the kept collocation points
/// (row-major block order).
pub fn build_approx_problem_2d(cfg: &ApproxConfig, samples: &[f64]) -> Result<AZProblem> {
    if cfg.dimension() != 2 {
        return Err(Error::InvalidParameter(
            "expected a 2D configuration".into(),
        ));
    }
    Discretization::new(cfg)?.build_problem(samples)
}

/// Error probe points for a configuration; see
/// [`Discretization::probe_points`].
pub fn probe_points(cfg: &ApproxConfig) -> Vec<[f64; 2]> {
    let axis = |a: &AxisConfig, factor: usize| -> Vec<f64> {
        let count = a.n * a.s * factor;
        let h = 2.0 * a.half_period / count as f64;
        (0..count).map(|i| -a.half_period + i as f64 * h).collect()
    };
    match &cfg.y {
        None => axis(&cfg.x, 10)
            .into_iter()
            .filter(|&x| cfg.domain.contains(x, 0.0))
            .map(|x| [x, 0.0])
            .collect(),
        Some(y) => {
            let ys = axis(y, 3);
            axis(&cfg.x, 3)
                .into_iter()
                .flat_map(|x| ys.iter().map(move |&y| [x, y]))
                .filter(|&[x, y]| cfg.domain.contains(x, y))
                .collect()
        }
    }
}

/// Nonzero periodized basis values `(j, φ⁽ᵒ⁾_j(x))` along one axis: only
/// centers within the support radius of `x` (modulo the period).
pub(crate) fn axis_window(
    spec: &KernelSpec,
    n: usize,
    x: f64,
    order: Derivative,
) -> Vec<(usize, f64)> {
    let t = spec.half_period();
    let h = 2.0 * t / n as f64;
    let width = (spec.support_radius() / h).ceil() as i64 + 1;
    if 2 * width + 1 >= n as i64 {
        return (0..n)
            .map(|j| (j, spec.periodized(x + t - j as f64 * h, order)))
            .collect();
    }
    let j0 = ((x + t) / h).round() as i64;
    (j0 - width..=j0 + width)
        .map(|j| {
            let jj = j.rem_euclid(n as i64) as usize;
            (jj, spec.periodized(x + t - jj as f64 * h, order))
        })
        .collect()
}

/// A periodized Gaussian RBF expansion `Σ aⱼ φⱼ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    coefficients: Vec<f64>,
    x: (KernelSpec, usize),
    y: Option<(KernelSpec, usize)>,
}

impl Expansion {
    pub fn new_1d(coefficients: Vec<f64>, kernel: KernelSpec, n: usize) -> Result<Self> {
        check_len("expansion coefficients", n, coefficients.len())?;
        check_finite_coefficients(&coefficients)?;
        Ok(Self {
            coefficients,
            x: (kernel, n),
            y: None,
        })
    }

    /// Tensor expansion with `φⱼ(x, y) = φᵐ(x) φⁿ(y)`, `j = m·ny + n`.
    pub fn new_2d(
        coefficients: Vec<f64>,
        x: (KernelSpec, usize),
        y: (KernelSpec, usize),
    ) -> Result<Self> {
        check_len("expansion coefficients", x.1 * y.1, coefficients.len())?;
        check_finite_coefficients(&coefficients)?;
        Ok(Self {
            coefficients,
            x,
            y: Some(y),
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn dimension(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    /// Centers along the x axis.
    pub fn centers_x(&self) -> Vec<f64> {
        centers(&self.x)
    }

    /// Centers along the y axis (empty in 1D).
    pub fn centers_y(&self) -> Vec<f64> {
        self.y.as_ref().map(centers).unwrap_or_default()
    }

    /// Value at one point (`y` ignored in 1D).
    pub fn evaluate_at(&self, x: f64, y: f64) -> f64 {
        self.evaluate_derivative_at(x, y, Derivative::Value, Derivative::Value)
    }

    /// `∂ˣᵖ∂ʸᑫ` of the expansion at one point.
    pub fn evaluate_derivative_at(&self, x: f64, y: f64, dx: Derivative, dy: Derivative) -> f64 {
        let (kx, nx) = &self.x;
        let wx = axis_window(kx, *nx, x, dx);
        match &self.y {
            None => wx.iter().map(|&(j, v)| self.coefficients[j] * v).sum(),
            Some((ky, ny)) => {
                let wy = axis_window(ky, *ny, y, dy);
                wx.iter()
                    .map(|&(jx, vx)| {
                        let row = &self.coefficients[jx * ny..(jx + 1) * ny];
                        vx * wy.iter().map(|&(jy, vy)| row[jy] * vy).sum::<f64>()
                    })
                    .sum()
            }
        }
    }

    pub fn evaluate(&self, points: &[[f64; 2]]) -> Vec<f64> {
        points
            .par_iter()
            .map(|&[x, y]| self.evaluate_at(x, y))
            .collect()
    }
}

fn centers((spec, n): &(KernelSpec, usize)) -> Vec<f64> {
    let t = spec.half_period();
    (0..*n)
        .map(|j| -t + j as f64 * 2.0 * t / *n as f64)
        .collect()
}

fn check_finite_coefficients(c: &[f64]) -> Result<()> {
    if c.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "expansion coefficients must be finite".into(),
        ))
    }
}

/// Values of the expansion at the given points.
pub fn evaluate_expansion(e: &Expansion, points: &[[f64; 2]]) -> Vec<f64> {
    e.evaluate(points)
}

/// Largest absolute deviation from `reference` over the probe points.
pub fn max_error(
    e: &Expansion,
    reference: &(dyn Fn(f64, f64) -> f64 + Sync),
    probe: &[[f64; 2]],
) -> f64 {
    probe
        .par_iter()
        .map(|&[x, y]| (e.evaluate_at(x, y) - reference(x, y)).abs())
        .reduce(|| 0.0, f64::max)
}

/// Builtin test functions, parameterized by the center counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceFn {
    /// `sin(⌊N/5⌋ π x)`
    Per1d,
    /// `sin(N x / 5)`
    Non1d,
    /// `sin(⌊N/10⌋ π (x + y))`
    Per2d,
    /// `sin(Nx x / 10 + Ny y / 10)`
    Non2d,
}

impl ReferenceFn {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "per1d" => Ok(Self::Per1d),
            "non1d" => Ok(Self::Non1d),
            "per2d" => Ok(Self::Per2d),
            "non2d" => Ok(Self::Non2d),
            other => Err(Error::InvalidParameter(format!(
                "unknown function '{other}' (expected per1d, non1d, per2d or non2d)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Per1d => "per1d",
            Self::Non1d => "non1d",
            Self::Per2d => "per2d",
            Self::Non2d => "non2d",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::Per1d | Self::Non1d => 1,
            Self::Per2d | Self::Non2d => 2,
        }
    }

    pub fn eval(&self, nx: usize, ny: usize, x: f64, y: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            Self::Per1d => ((nx / 5) as f64 * PI * x).sin(),
            Self::Non1d => (nx as f64 * x / 5.0).sin(),
            Self::Per2d => ((nx / 10) as f64 * PI * (x + y)).sin(),
            Self::Non2d => (nx as f64 * x / 10.0 + ny as f64 * y / 10.0).sin(),
        }
    }

    /// The function bound to center counts `(nx, ny)`.
    pub fn bind(self, nx: usize, ny: usize) -> impl Fn(f64, f64) -> f64 + Send + Sync + Copy {
        move |x, y| self.eval(nx, ny, x, y)
    }
}
