//! The AZ algorithm over matrix-free operators.
//!
//! Given `A` and an approximate generalized inverse `Z*`, the least-squares
//! problem `Ax ≈ b` is split into
//!
//! 1. `(I - AZ*) A x₂ ≈ (I - AZ*) b`, a problem of low numerical rank solved
//!    with a randomized truncated SVD, and
//! 2. `x₁ = Z*(b - A x₂)`,
//!
//! and the solution is `x = x₁ + x₂`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::kernel::bandwidth;

/// A real linear map with an adjoint, applied without forming a matrix.
///
/// Implementations must be pure: `apply` may be called concurrently.
/// Both methods assume correctly sized input; callers validate lengths.
pub trait LinearOperator: Send + Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64>;
}

pub type OperatorHandle = Arc<dyn LinearOperator>;

type ApplyFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Operator defined by a pair of closures.
pub struct FnOperator {
    nrows: usize,
    ncols: usize,
    apply: ApplyFn,
    adjoint: ApplyFn,
}

impl FnOperator {
    pub fn new<F, G>(nrows: usize, ncols: usize, apply: F, adjoint: G) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            nrows,
            ncols,
            apply: Box::new(apply),
            adjoint: Box::new(adjoint),
        }
    }

    pub fn into_handle(self) -> OperatorHandle {
        Arc::new(self)
    }
}

impl LinearOperator for FnOperator {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.apply)(x)
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        (self.adjoint)(y)
    }
}

/// The zero map between spaces of the given sizes.
#[derive(Debug, Clone, Copy)]
pub struct ZeroOperator {
    pub nrows: usize,
    pub ncols: usize,
}

impl LinearOperator for ZeroOperator {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.nrows]
    }

    fn apply_adjoint(&self, _y: &[f64]) -> Vec<f64> {
        vec![0.0; self.ncols]
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        check_len("dense matrix data", nrows * ncols, data.len())?;
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.nrows, self.ncols, |i, j| self.get(i, j))
    }

    pub fn into_handle(self) -> OperatorHandle {
        Arc::new(self)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> Result<f64> {
        let s = self
            .to_faer()
            .singular_values()
            .map_err(|_| Error::SvdFailed)?;
        Ok(s.first().copied().unwrap_or(0.0))
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }
}

/// Largest number of columns for which dense assembly is allowed.
pub const DENSE_COLUMN_LIMIT: usize = 4000;

/// Dense matrix of an operator, assembled column by column from unit
/// vectors.
pub fn to_dense(op: &dyn LinearOperator) -> Result<DenseMatrix> {
    let (m, n) = (op.nrows(), op.ncols());
    if n > DENSE_COLUMN_LIMIT {
        return Err(Error::DenseTooLarge {
            cols: n,
            limit: DENSE_COLUMN_LIMIT,
        });
    }
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply(&e)
        })
        .collect();
    Ok(DenseMatrix::from_fn(m, n, |i, j| columns[j][i]))
}

/// Kind of problem an [`AZProblem`] encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Approx1d,
    Approx2d,
    Ode,
    Pde,
    Generic,
}

/// Descriptive data carried alongside the operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemMeta {
    pub kind: ProblemKind,
    pub tau0: f64,
    /// Number of coefficients.
    pub n: usize,
    /// Interior collocation rows.
    pub m: usize,
    /// Boundary rows.
    pub mb: usize,
}

impl ProblemMeta {
    pub fn generic(n: usize, m: usize, tau0: f64) -> Self {
        Self {
            kind: ProblemKind::Generic,
            tau0,
            n,
            m,
            mb: 0,
        }
    }
}

/// Inputs of the AZ algorithm.
#[derive(Clone)]
pub struct AZProblem {
    a: OperatorHandle,
    zstar: OperatorHandle,
    /// Optional direct implementation of `AZ*` (an `M × M` map) that is more
    /// accurate than composing `A` with `Z*`.
    az: Option<OperatorHandle>,
    b: Vec<f64>,
    rank_estimate: usize,
    meta: ProblemMeta,
}

impl std::fmt::Debug for AZProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AZProblem")
            .field("nrows", &self.a.nrows())
            .field("ncols", &self.a.ncols())
            .field("fused_projector", &self.az.is_some())
            .field("rank_estimate", &self.rank_estimate)
            .field("meta", &self.meta)
            .finish()
    }
}

impl AZProblem {
    pub fn new(
        a: OperatorHandle,
        zstar: OperatorHandle,
        b: Vec<f64>,
        rank_estimate: usize,
        meta: ProblemMeta,
    ) -> Result<Self> {
        check_len("Z* rows vs A columns", a.ncols(), zstar.nrows())?;
        check_len("Z* columns vs A rows", a.nrows(), zstar.ncols())?;
        check_len("right-hand side", a.nrows(), b.len())?;
        if rank_estimate == 0 {
            return Err(Error::InvalidParameter(
                "rank estimate must be at least 1".into(),
            ));
        }
        Ok(Self {
            a,
            zstar,
            az: None,
            b,
            rank_estimate,
            meta,
        })
    }

    /// Attach a direct implementation of `AZ*`.
    pub fn with_projector(mut self, az: OperatorHandle) -> Result<Self> {
        check_len("AZ* rows", self.a.nrows(), az.nrows())?;
        check_len("AZ* columns", self.a.nrows(), az.ncols())?;
        self.az = Some(az);
        Ok(self)
    }

    pub fn with_rhs(mut self, b: Vec<f64>) -> Result<Self> {
        check_len("right-hand side", self.a.nrows(), b.len())?;
        self.b = b;
        Ok(self)
    }

    pub fn with_rank_estimate(mut self, rank_estimate: usize) -> Result<Self> {
        if rank_estimate == 0 {
            return Err(Error::InvalidParameter(
                "rank estimate must be at least 1".into(),
            ));
        }
        self.rank_estimate = rank_estimate;
        Ok(self)
    }

    pub fn a(&self) -> &OperatorHandle {
        &self.a
    }

    pub fn zstar(&self) -> &OperatorHandle {
        &self.zstar
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn rank_estimate(&self) -> usize {
        self.rank_estimate
    }

    pub fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    /// `AZ*` as an operator, fused when available.
    pub fn projector(&self) -> OperatorHandle {
        match &self.az {
            Some(az) => az.clone(),
            None => Arc::new(Composed {
                outer: self.a.clone(),
                inner: self.zstar.clone(),
            }),
        }
    }

    /// `I - AZ*`.
    pub fn complement(&self) -> OperatorHandle {
        Arc::new(Complement {
            projector: self.projector(),
        })
    }

    /// The step-1 operator `(I - AZ*) A = A - AZ*A`.
    pub fn step1_operator(&self) -> OperatorHandle {
        Arc::new(Composed {
            outer: self.complement(),
            inner: self.a.clone(),
        })
    }
}

struct Composed {
    outer: OperatorHandle,
    inner: OperatorHandle,
}

impl LinearOperator for Composed {
    fn nrows(&self) -> usize {
        self.outer.nrows()
    }

    fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.outer.apply(&self.inner.apply(x))
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.inner.apply_adjoint(&self.outer.apply_adjoint(y))
    }
}

struct Complement {
    projector: OperatorHandle,
}

impl LinearOperator for Complement {
    fn nrows(&self) -> usize {
        self.projector.nrows()
    }

    fn ncols(&self) -> usize {
        self.projector.ncols()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let p = self.projector.apply(x);
        x.iter().zip(p).map(|(a, b)| a - b).collect()
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        let p = self.projector.apply_adjoint(y);
        y.iter().zip(p).map(|(a, b)| a - b).collect()
    }
}

/// Default oversampling of the randomized sketch.
pub const DEFAULT_OVERSAMPLING: usize = 10;

/// Smallest default step-1 truncation threshold, about 45 unit roundoffs.
pub const MIN_THRESHOLD: f64 = 1e-14;

/// Default relative truncation threshold of step 1: `max(τ₀², 10⁻¹⁴)`.
///
/// The step-1 residual `η` enters the final residual multiplied by
/// `‖Z*‖`, which grows like a negative power of `τ₀`; truncating at `τ₀²`
/// keeps that product small.
pub fn default_threshold(tau0: f64) -> f64 {
    (tau0 * tau0).max(MIN_THRESHOLD)
}

/// Default seed of the sketch generator.
pub const DEFAULT_SEED: u64 = 20_220_801;

/// Options of [`az_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Extra sketch columns beyond the rank estimate.
    pub oversampling: usize,
    /// Relative singular value cutoff of step 1; `None` uses
    /// [`default_threshold`] of the problem's `τ₀`.
    pub threshold: Option<f64>,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            oversampling: DEFAULT_OVERSAMPLING,
            threshold: None,
            seed: DEFAULT_SEED,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Wall time of each phase of [`az_solve`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepTimings {
    pub step1: Duration,
    pub step2: Duration,
    pub total: Duration,
}

/// Output of [`az_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct AZReport {
    pub solution: Vec<f64>,
    /// Singular values of the step-1 sketch kept by the truncation.
    pub step1_rank: usize,
    pub sketch_size: usize,
    /// The kept rank equals the sketch size, so the sketch may be too small.
    pub saturated: bool,
    pub residual_norm: f64,
    pub coef_norm: f64,
    pub timings: StepTimings,
}

/// Output of [`randomized_lsq`].
#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub x: Vec<f64>,
    pub effective_rank: usize,
    pub sketch_size: usize,
    pub saturated: bool,
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_threshold(threshold: f64) -> Result<()> {
    if (0.0..1.0).contains(&threshold) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "relative truncation threshold must lie in [0, 1), got {threshold}"
        )))
    }
}

fn check_finite(context: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{context} contains non-finite entries"
        )))
    }
}

/// Gaussian test matrix `Ω` (`ncols × k`) stored by columns.
fn gaussian_columns(rows: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| (0..rows).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect()
}

fn columns_to_faer(cols: &[Vec<f64>], nrows: usize) -> Mat<f64> {
    Mat::from_fn(nrows, cols.len(), |i, j| cols[j][i])
}

/// Truncated-SVD least squares `min ‖S y - rhs‖` for a tall `S`, via a thin
/// QR followed by an SVD of the triangular factor. Singular values below
/// `max(threshold · σ_max, floor)` are dropped. Returns `y` and the kept
/// rank.
fn tsvd_solve_tall(
    s: &Mat<f64>,
    rhs: &[f64],
    threshold: f64,
    floor: f64,
) -> Result<(Vec<f64>, usize)> {
    let k = s.ncols();
    let qr = s.qr();
    let q = qr.compute_thin_Q();
    let r = qr.thin_R().to_owned();
    let svd = r.thin_svd().map_err(|_| Error::SvdFailed)?;
    let sigma = svd.S().column_vector();
    let u = svd.U();
    let v = svd.V();
    let qt_rhs: Vec<f64> = (0..q.ncols())
        .map(|j| (0..q.nrows()).map(|i| q[(i, j)] * rhs[i]).sum())
        .collect();
    let smax = (0..sigma.nrows()).fold(0.0f64, |m, i| m.max(sigma[i]));
    let cutoff = (threshold * smax).max(floor);
    let mut y = vec![0.0; k];
    let mut rank = 0;
    if smax > 0.0 {
        for l in 0..sigma.nrows() {
            let s_l = sigma[l];
            if s_l < cutoff || s_l == 0.0 {
                continue;
            }
            rank += 1;
            let coef = (0..u.nrows()).map(|i| u[(i, l)] * qt_rhs[i]).sum::<f64>() / s_l;
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += v[(j, l)] * coef;
            }
        }
    }
    Ok((y, rank))
}

/// Randomized truncated-SVD least squares for an operator of low numerical
/// rank.
///
/// Draws a standard normal `Ω` with `r_est + p` columns from a seeded
/// generator, forms `S = Mop Ω`, solves `min ‖S y - rhs‖` with singular
/// values below `threshold · σ_max` discarded and returns `x = Ω y`.
pub fn randomized_lsq(
    op: &dyn LinearOperator,
    rhs: &[f64],
    r_est: usize,
    p: usize,
    threshold: f64,
    seed: u64,
) -> Result<LsqSolution> {
    randomized_lsq_floored(op, rhs, r_est, p, threshold, 0.0, seed)
}

/// [`randomized_lsq`] that also discards sketch singular values below the
/// absolute level `floor`.
pub fn randomized_lsq_floored(
    op: &dyn LinearOperator,
    rhs: &[f64],
    r_est: usize,
    p: usize,
    threshold: f64,
    floor: f64,
    seed: u64,
) -> Result<LsqSolution> {
    check_len("randomized least-squares rhs", op.nrows(), rhs.len())?;
    check_threshold(threshold)?;
    let k = r_est + p;
    if k == 0 || k > op.ncols() {
        return Err(Error::SketchTooLarge {
            sketch: k,
            cols: op.ncols(),
        });
    }
    let omega = gaussian_columns(op.ncols(), k, seed);
    let sketch: Vec<Vec<f64>> = omega.par_iter().map(|w| op.apply(w)).collect();
    let (y, rank) = if op.nrows() >= k {
        tsvd_solve_tall(&columns_to_faer(&sketch, op.nrows()), rhs, threshold, floor)?
    } else {
        let dense = DenseMatrix::from_fn(op.nrows(), k, |i, j| sketch[j][i]);
        tsvd_solve_wide(&dense, rhs, threshold, floor)?
    };
    let mut x = vec![0.0; op.ncols()];
    for (w, yj) in omega.iter().zip(&y) {
        for (xi, wi) in x.iter_mut().zip(w) {
            *xi += wi * yj;
        }
    }
    Ok(LsqSolution {
        x,
        effective_rank: rank,
        sketch_size: k,
        saturated: rank == k,
    })
}

/// Minimum-norm least-squares solution keeping singular directions with
/// `σ ≥ threshold · σ_max`.
pub fn dense_tsvd_lsq(a: &DenseMatrix, rhs: &[f64], threshold: f64) -> Result<Vec<f64>> {
    check_len("dense least-squares rhs", a.nrows(), rhs.len())?;
    check_threshold(threshold)?;
    if a.ncols() > DENSE_COLUMN_LIMIT {
        return Err(Error::DenseTooLarge {
            cols: a.ncols(),
            limit: DENSE_COLUMN_LIMIT,
        });
    }
    if a.nrows() >= a.ncols() {
        return Ok(tsvd_solve_tall(&a.to_faer(), rhs, threshold, 0.0)?.0);
    }
    Ok(tsvd_solve_wide(a, rhs, threshold, 0.0)?.0)
}

fn tsvd_solve_wide(
    a: &DenseMatrix,
    rhs: &[f64],
    threshold: f64,
    floor: f64,
) -> Result<(Vec<f64>, usize)> {
    let svd = a.to_faer().thin_svd().map_err(|_| Error::SvdFailed)?;
    let sigma = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    let smax = (0..sigma.nrows()).fold(0.0f64, |m, i| m.max(sigma[i]));
    let cutoff = (threshold * smax).max(floor);
    let mut x = vec![0.0; a.ncols()];
    let mut rank = 0;
    if smax == 0.0 {
        return Ok((x, 0));
    }
    for l in 0..sigma.nrows() {
        let s_l = sigma[l];
        if s_l < cutoff || s_l == 0.0 {
            continue;
        }
        rank += 1;
        let coef = (0..u.nrows()).map(|i| u[(i, l)] * rhs[i]).sum::<f64>() / s_l;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += v[(j, l)] * coef;
        }
    }
    Ok((x, rank))
}

/// Result of [`numerical_rank`].
#[derive(Debug, Clone, PartialEq)]
pub struct RankEstimate {
    pub rank: usize,
    /// Singular values of the sketched operator, descending.
    pub singular_values: Vec<f64>,
    /// Number of probe vectors used.
    pub budget: usize,
    /// The count reached the budget, so the true rank may be larger.
    pub saturated: bool,
}

/// Number of singular values above `delta · σ_max`, estimated with a
/// randomized range finder: `Q = orth(Mop Ω)`, then the singular values of
/// `Qᵀ Mop` (computed through the adjoint). Exact up to roundoff when the
/// budget reaches the smaller operator dimension.
pub fn numerical_rank(
    op: &dyn LinearOperator,
    delta: f64,
    probe_budget: usize,
    seed: u64,
) -> Result<RankEstimate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rank tolerance must lie in (0, 1), got {delta}"
        )));
    }
    if probe_budget == 0 {
        return Err(Error::InvalidParameter(
            "probe budget must be positive".into(),
        ));
    }
    let k = probe_budget.min(op.ncols()).min(op.nrows());
    if k == 0 {
        return Ok(RankEstimate {
            rank: 0,
            singular_values: Vec::new(),
            budget: 0,
            saturated: false,
        });
    }
    let omega = gaussian_columns(op.ncols(), k, seed);
    let sketch: Vec<Vec<f64>> = omega.par_iter().map(|w| op.apply(w)).collect();
    let y = columns_to_faer(&sketch, op.nrows());
    let q = y.qr().compute_thin_Q();
    let q_cols: Vec<Vec<f64>> = (0..q.ncols())
        .map(|j| (0..q.nrows()).map(|i| q[(i, j)]).collect())
        .collect();
    let projected: Vec<Vec<f64>> = q_cols.par_iter().map(|c| op.apply_adjoint(c)).collect();
    let c = columns_to_faer(&projected, op.ncols());
    let mut singular_values = c.singular_values().map_err(|_| Error::SvdFailed)?;
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank = if smax > 0.0 {
        singular_values
            .iter()
            .filter(|&&s| s > delta * smax)
            .count()
    } else {
        0
    };
    let full = k == op.ncols().min(op.nrows());
    Ok(RankEstimate {
        rank,
        singular_values,
        budget: k,
        saturated: rank == k && !full,
    })
}

/// Default step-1 rank estimate for 1D approximation: `⌈4W⌉` at
/// `δ = 10⁻¹²`.
pub fn default_rank_1d(tau0: f64) -> Result<usize> {
    Ok((4.0 * bandwidth(1e-12, tau0)?).ceil() as usize)
}

/// Default step-1 rank estimate for 2D approximation with `n` centers:
/// `max(20, ⌈22√n - 120⌉)`.
pub fn default_rank_2d(n: usize) -> usize {
    let est = (22.0 * (n as f64).sqrt() - 120.0).ceil();
    if est > 20.0 {
        est as usize
    } else {
        20
    }
}

const NORM_ITERATIONS: usize = 8;

/// Lower estimate of `‖A‖₂` from power iterations on `AᵀA` started at a
/// seeded Gaussian vector.
pub fn operator_norm_estimate(op: &dyn LinearOperator, iterations: usize, seed: u64) -> f64 {
    let mut v = gaussian_columns(op.ncols(), 1, seed ^ 0x5eed).remove(0);
    let mut est = 0.0;
    for _ in 0..iterations.max(1) {
        let nv = norm2(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let av = op.apply(&v);
        est = norm2(&av);
        v = op.apply_adjoint(&av);
    }
    est
}

/// Solve `Ax ≈ b` with the two-step AZ algorithm.
pub fn az_solve(problem: &AZProblem, cfg: &SolverConfig) -> Result<AZReport> {
    check_finite("right-hand side", problem.b())?;
    let threshold = cfg
        .threshold
        .unwrap_or_else(|| default_threshold(problem.meta.tau0));
    check_threshold(threshold)?;
    let start = Instant::now();
    let a = problem.a();
    let n = a.ncols();
    let complement = problem.complement();
    let step1 = problem.step1_operator();

    let rhs1 = complement.apply(problem.b());
    let p = cfg.oversampling.min(n);
    let r = problem.rank_estimate().min(n - p).max(usize::from(p == 0));
    // Sketch directions below roundoff of `‖A‖ ‖Ω‖` carry no information;
    // without this floor a numerically vanishing step-1 operator (e.g. a
    // domain equal to the whole box) would amplify pure noise.
    let omega_norm = (n as f64).sqrt() + ((r + p) as f64).sqrt();
    let floor =
        MIN_THRESHOLD * operator_norm_estimate(a.as_ref(), NORM_ITERATIONS, cfg.seed) * omega_norm;
    let lsq = randomized_lsq_floored(step1.as_ref(), &rhs1, r, p, threshold, floor, cfg.seed)?;
    let step1_time = start.elapsed();

    let t2 = Instant::now();
    let x2 = lsq.x;
    let ax2 = a.apply(&x2);
    let r2: Vec<f64> = problem.b().iter().zip(&ax2).map(|(b, v)| b - v).collect();
    let x1 = problem.zstar().apply(&r2);
    let solution: Vec<f64> = x1.iter().zip(&x2).map(|(u, v)| u + v).collect();
    let step2_time = t2.elapsed();

    let ax = a.apply(&solution);
    let residual_norm = norm2(
        &ax.iter()
            .zip(problem.b())
            .map(|(u, v)| u - v)
            .collect::<Vec<_>>(),
    );
    let coef_norm = norm2(&solution);
    Ok(AZReport {
        solution,
        step1_rank: lsq.effective_rank,
        sketch_size: lsq.sketch_size,
        saturated: lsq.saturated,
        residual_norm,
        coef_norm,
        timings: StepTimings {
            step1: step1_time,
            step2: step2_time,
            total: start.elapsed(),
        },
    })
}

/// Residual norm `‖Ax - b‖`.
pub fn residual_norm(a: &dyn LinearOperator, x: &[f64], b: &[f64]) -> Result<f64> {
    check_len("residual solution", a.ncols(), x.len())?;
    check_len("residual rhs", a.nrows(), b.len())?;
    let ax = a.apply(x);
    Ok(norm2(
        &ax.iter().zip(b).map(|(u, v)| u - v).collect::<Vec<_>>(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_problem_returns_rhs() {
        let id = DenseMatrix::identity(6).into_handle();
        let b = vec![1.0, -2.0, 3.0, 0.5, 0.0, 7.0];
        let meta = ProblemMeta::generic(6, 6, 1e-10);
        let prob = AZProblem::new(id.clone(), id, b.clone(), 1, meta).unwrap();
        let report = az_solve(&prob, &SolverConfig::default()).unwrap();
        for (x, y) in report.solution.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(report.step1_rank, 0);
    }

    #[test]
    fn dimension_chain_is_checked() {
        let a = DenseMatrix::zeros(5, 3).into_handle();
        let z = DenseMatrix::zeros(5, 3).into_handle();
        let meta = ProblemMeta::generic(3, 5, 1e-10);
        assert!(AZProblem::new(a, z, vec![0.0; 5], 1, meta).is_err());
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = DenseMatrix::from_fn(12, 8, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let x = randomized_lsq(&a, &[0.0; 12], 3, 2, 1e-12, 1).unwrap();
        assert!(x.x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_operator_has_rank_zero() {
        let z = ZeroOperator {
            nrows: 10,
            ncols: 7,
        };
        let x = randomized_lsq(&z, &[1.0; 10], 2, 3, 1e-10, 3).unwrap();
        assert_eq!(x.effective_rank, 0);
        assert!(x.x.iter().all(|&v| v == 0.0));
        let r = numerical_rank(&z, 1e-10, 5, 3).unwrap();
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn sketch_larger_than_operator_is_refused() {
        let z = ZeroOperator {
            nrows: 10,
            ncols: 4,
        };
        assert!(matches!(
            randomized_lsq(&z, &[0.0; 10], 3, 2, 1e-10, 0),
            Err(Error::SketchTooLarge { sketch: 5, cols: 4 })
        ));
    }

    #[test]
    fn dense_guard() {
        let a = DenseMatrix::zeros(1, DENSE_COLUMN_LIMIT + 1);
        assert!(matches!(
            dense_tsvd_lsq(&a, &[0.0], 1e-12),
            Err(Error::DenseTooLarge { .. })
        ));
    }

    #[test]
    fn default_rank_estimates() {
        assert_eq!(default_rank_1d(1e-10).unwrap(), 65);
        assert_eq!(default_rank_2d(100), 100);
        assert_eq!(default_rank_2d(16), 20);
        assert_eq!(default_rank_2d(2500), 980);
    }
}
