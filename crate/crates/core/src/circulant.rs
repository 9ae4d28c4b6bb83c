//! FFT diagonalization of block-column circulant systems.
//!
//! With centers and oversampled grid points both equispaced on `[-T, T)`,
//! the collocation matrix in block order is a vertical stack of `s`
//! circulant `N × N` blocks `C_i`. Each block is diagonalized by the DFT:
//! `C_i = F D_i F*`, so `B = P Π Aᶜ F` is block-column diagonal with
//! diagonals `d_i`. The pseudo-inverse of `B` is block-row diagonal with
//! `d̃_i = conj(d_i) / Σ_k |d_k|²`.
//!
//! Conventions: `F_kl = N^{-1/2} e^{+2πi kl/N}` (unitary). Internally the
//! unnormalized transforms are used: `fft` computes `Σ x_j e^{-2πijk/N}`
//! (that is `√N F*`) and `ifft` computes `Σ x_k e^{+2πijk/N}` (`√N F`).
//! The stored diagonals are the exact eigenvalues of the circulant blocks,
//! `d_i = fft(v_i) = √N F* v_i`, where `v_i` is the first column of `C_i`.
//!
//! Everything generalizes to tensor products of two axes: the 2D DFT plays
//! the role of `F`, and a block is a pair `(i_x, i_y)` of shifted grids.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Error, Result};
use crate::kernel::{exponent_cutoff, Derivative, KernelSpec};

pub type C64 = Complex64;

/// Unnormalized forward/inverse DFT over a row-major `nx × ny` array
/// (`ny == 1` for one axis).
#[derive(Clone)]
pub struct SpectralPlan {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish()
    }
}

impl SpectralPlan {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ x_j e^{-2πi jk/N}` along every axis, in place.
    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, &self.fwd_x, &self.fwd_y);
    }

    /// `Σ x_k e^{+2πi jk/N}` along every axis, in place. No scaling.
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, &self.inv_x, &self.inv_y);
    }

    fn run(&self, data: &mut [C64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.len());
        if self.ny > 1 {
            fy.process(data);
        }
        if self.nx > 1 {
            if self.ny == 1 {
                fx.process(data);
            } else {
                let mut column = vec![C64::default(); self.nx];
                for ky in 0..self.ny {
                    for (kx, c) in column.iter_mut().enumerate() {
                        *c = data[kx * self.ny + ky];
                    }
                    fx.process(&mut column);
                    for (kx, c) in column.iter().enumerate() {
                        data[kx * self.ny + ky] = *c;
                    }
                }
            }
        }
    }
}

/// Unitary DFT `F v` with `F_kl = N^{-1/2} e^{+2πi kl/N}`.
pub fn dft_unitary(v: &[C64]) -> Vec<C64> {
    let plan = SpectralPlan::new(v.len(), 1);
    let mut out = v.to_vec();
    plan.inverse(&mut out);
    let scale = 1.0 / (v.len() as f64).sqrt();
    out.iter_mut().for_each(|c| *c *= scale);
    out
}

/// Adjoint `F* v` of [`dft_unitary`].
pub fn dft_unitary_adjoint(v: &[C64]) -> Vec<C64> {
    let plan = SpectralPlan::new(v.len(), 1);
    let mut out = v.to_vec();
    plan.forward(&mut out);
    let scale = 1.0 / (v.len() as f64).sqrt();
    out.iter_mut().for_each(|c| *c *= scale);
    out
}

/// How the flattened diagonals of a [`BlockSymbol`] map onto grid axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolLayout {
    /// One axis; `order` records the kernel derivative when assembled from a
    /// kernel.
    OneD { order: Option<Derivative> },
    /// Tensor product of two axes. Blocks are numbered `ix * sy + iy` and
    /// entries `kx * ny + ky`.
    Tensor {
        nx: usize,
        ny: usize,
        sx: usize,
        sy: usize,
    },
}

/// Diagonals `d_1 … d_s` of the block-column diagonal matrix `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSymbol {
    n: usize,
    diags: Vec<Vec<C64>>,
    layout: SymbolLayout,
}

impl BlockSymbol {
    /// Symbol of the stacked circulant blocks with the given first columns.
    pub fn from_first_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidParameter(
                "a block symbol needs at least one non-empty block".into(),
            ));
        }
        let plan = SpectralPlan::new(n, 1);
        let mut diags = Vec::with_capacity(columns.len());
        for col in columns {
            check_len("circulant first column", n, col.len())?;
            let mut d: Vec<C64> = col.iter().map(|&v| C64::new(v, 0.0)).collect();
            plan.forward(&mut d);
            diags.push(d);
        }
        Ok(Self {
            n,
            diags,
            layout: SymbolLayout::OneD { order: None },
        })
    }

    /// Build directly from diagonals (1D layout).
    pub fn from_diagonals(diags: Vec<Vec<C64>>) -> Result<Self> {
        let n = diags.first().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidParameter(
                "a block symbol needs at least one non-empty block".into(),
            ));
        }
        for d in &diags {
            check_len("symbol diagonal", n, d.len())?;
        }
        Ok(Self {
            n,
            diags,
            layout: SymbolLayout::OneD { order: None },
        })
    }

    /// Block size `N` (product of both axes for tensor layouts).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of diagonal blocks `s`.
    pub fn s(&self) -> usize {
        self.diags.len()
    }

    pub fn diags(&self) -> &[Vec<C64>] {
        &self.diags
    }

    pub fn layout(&self) -> SymbolLayout {
        self.layout
    }

    /// Axis sizes `(nx, ny, sx, sy)`; 1D symbols report `ny = sy = 1`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        match self.layout {
            SymbolLayout::OneD { .. } => (self.n, 1, self.s(), 1),
            SymbolLayout::Tensor { nx, ny, sx, sy } => (nx, ny, sx, sy),
        }
    }

    /// `Σ cᵢ Bᵢ` over symbols with identical dimensions and layout.
    pub fn linear_combination(terms: &[(f64, &BlockSymbol)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination of symbols".into()))?;
        let mut diags = vec![vec![C64::default(); first.n]; first.s()];
        for (coef, sym) in terms {
            if sym.dims() != first.dims() {
                return Err(Error::InvalidParameter(
                    "symbols in a linear combination must share dimensions".into(),
                ));
            }
            for (acc, d) in diags.iter_mut().zip(&sym.diags) {
                for (a, v) in acc.iter_mut().zip(d) {
                    *a += *v * *coef;
                }
            }
        }
        let layout = match first.layout {
            SymbolLayout::OneD { .. } => SymbolLayout::OneD { order: None },
            tensor => tensor,
        };
        Ok(Self {
            n: first.n,
            diags,
            layout,
        })
    }

    /// Forward action `v ↦ (D_1 v; …; D_s v)`, length `sN`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        check_len("block symbol input", self.n, v.len())?;
        Ok(self
            .diags
            .iter()
            .flat_map(|d| d.iter().zip(v).map(|(a, b)| a * b))
            .collect())
    }
}

/// Diagonals `d_i` of the block symbol of the periodized kernel derivative
/// sampled on `s` shifted grids: one FFT per shifted grid.
pub fn assemble_symbol(
    spec: &KernelSpec,
    n: usize,
    s: usize,
    order: Derivative,
) -> Result<BlockSymbol> {
    if n < 2 || s < 1 {
        return Err(Error::InvalidParameter(format!(
            "symbol needs N >= 2 and s >= 1, got N={n}, s={s}"
        )));
    }
    let t = spec.half_period();
    let h_n = 2.0 * t / n as f64;
    let h_l = h_n / s as f64;
    // Shifted grid i relative to the first center: i·h_L + k·h_N.
    let columns: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            (0..n)
                .map(|k| spec.periodized(i as f64 * h_l + k as f64 * h_n, order))
                .collect()
        })
        .collect();
    let mut sym = BlockSymbol::from_first_columns(&columns)?;
    sym.layout = SymbolLayout::OneD { order: Some(order) };
    Ok(sym)
}

/// Fourier-side row `H_k = Σ_j φ⁽ᵒ⁾_j(x) e^{+2πi jk/N}` of the basis
/// evaluated at a single point `x`, computed from the continuous Fourier
/// transform of the Gaussian (Poisson summation).
///
/// Entries are accurate relative to their own size, including the
/// exponentially small high-frequency ones that an FFT of the sampled row
/// would swamp with roundoff.
pub fn fourier_row(spec: &KernelSpec, n: usize, x: f64, order: Derivative) -> Vec<C64> {
    let t = spec.half_period();
    let h = 2.0 * t / n as f64;
    let shift = x + t;
    let reach = spec.epsilon() * h * (exponent_cutoff().sqrt() + 1.0) / std::f64::consts::PI;
    (0..n)
        .map(|k| {
            let base = k as f64 / n as f64;
            let m_lo = (base - reach).floor() as i64;
            let m_hi = (base + reach).ceil() as i64;
            let mut acc = C64::default();
            for m in m_lo..=m_hi {
                let nu = base - m as f64;
                let xi = nu / h;
                let (re, im) = spec.fourier_transform(xi, order);
                let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * shift * xi);
                acc += phase * C64::new(re, im);
            }
            acc / h
        })
        .collect()
}

/// Block-row diagonal pseudo-inverse `B† = (B*B)⁻¹ B*`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPinv {
    n: usize,
    diags_tilde: Vec<Vec<C64>>,
    normalizer: Vec<f64>,
}

impl SymbolPinv {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.diags_tilde.len()
    }

    pub fn diags_tilde(&self) -> &[Vec<C64>] {
        &self.diags_tilde
    }

    /// Diagonal of `B*B`, `Σ_k |d_k|²` elementwise.
    pub fn normalizer(&self) -> &[f64] {
        &self.normalizer
    }

    /// `(v_1; …; v_s) ↦ Σ_i D̃_i v_i`, length `N`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        check_len("pseudo-inverse input", self.n * self.s(), v.len())?;
        let mut out = vec![C64::default(); self.n];
        for (dt, block) in self.diags_tilde.iter().zip(v.chunks_exact(self.n)) {
            for ((o, a), b) in out.iter_mut().zip(dt).zip(block) {
                *o += a * b;
            }
        }
        Ok(out)
    }
}

/// Elementwise pseudo-inverse `d̃_i = conj(d_i) / Σ_k |d_k|²`.
pub fn symbol_pinv(symbol: &BlockSymbol) -> Result<SymbolPinv> {
    let n = symbol.n();
    let mut normalizer = vec![0.0; n];
    for d in symbol.diags() {
        for (acc, v) in normalizer.iter_mut().zip(d) {
            *acc += v.norm_sqr();
        }
    }
    if let Some(index) = normalizer
        .iter()
        .position(|&v| !(v >= f64::MIN_POSITIVE && v.is_finite()))
    {
        return Err(Error::SingularSymbol { index });
    }
    let diags_tilde = symbol
        .diags()
        .iter()
        .map(|d| {
            d.iter()
                .zip(&normalizer)
                .map(|(v, nrm)| v.conj() / *nrm)
                .collect()
        })
        .collect();
    Ok(SymbolPinv {
        n,
        diags_tilde,
        normalizer,
    })
}

/// One term `coef · (Bˣ ⊗ Bʸ)` of a tensor symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTerm {
    pub coef: f64,
    pub x: BlockSymbol,
    pub y: BlockSymbol,
}

/// Sum of Kronecker products of two 1D block symbols, all sharing
/// dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSymbol {
    terms: Vec<TensorTerm>,
    nx: usize,
    ny: usize,
    sx: usize,
    sy: usize,
}

impl TensorSymbol {
    pub fn new(terms: Vec<TensorTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("tensor symbol needs a term".into()))?;
        let (nx, sx) = (first.x.n(), first.x.s());
        let (ny, sy) = (first.y.n(), first.y.s());
        for term in &terms {
            let ok = term.x.n() == nx
                && term.x.s() == sx
                && term.y.n() == ny
                && term.y.s() == sy
                && matches!(term.x.layout(), SymbolLayout::OneD { .. })
                && matches!(term.y.layout(), SymbolLayout::OneD { .. });
            if !ok {
                return Err(Error::InvalidParameter(
                    "all tensor terms must share 1D factor dimensions".into(),
                ));
            }
        }
        Ok(Self {
            terms,
            nx,
            ny,
            sx,
            sy,
        })
    }

    /// The plain product `Bˣ ⊗ Bʸ`.
    pub fn product(x: BlockSymbol, y: BlockSymbol) -> Result<Self> {
        Self::new(vec![TensorTerm { coef: 1.0, x, y }])
    }

    pub fn terms(&self) -> &[TensorTerm] {
        &self.terms
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.nx, self.ny, self.sx, self.sy)
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.terms.iter_mut().for_each(|t| t.coef *= factor);
        self
    }

    /// Forward action on a row-major `nx × ny` vector. The output follows
    /// the Kronecker row order: entry `(ix, kx, iy, ky)` at
    /// `(ix·nx + kx)·(sy·ny) + iy·ny + ky`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        let (nx, ny, sx, sy) = self.dims();
        check_len("tensor symbol input", nx * ny, v.len())?;
        let ly = sy * ny;
        let mut out = vec![C64::default(); sx * nx * ly];
        for term in &self.terms {
            for (ix, dx) in term.x.diags().iter().enumerate() {
                for (kx, &ax) in dx.iter().enumerate() {
                    let row = &v[kx * ny..(kx + 1) * ny];
                    let base = (ix * nx + kx) * ly;
                    let ax = ax * term.coef;
                    for (iy, dy) in term.y.diags().iter().enumerate() {
                        let dst = &mut out[base + iy * ny..base + (iy + 1) * ny];
                        for ((o, ay), r) in dst.iter_mut().zip(dy).zip(row) {
                            *o += ax * ay * r;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Flatten into one block symbol over the pair blocks `(ix, iy)`.
    pub fn to_block_symbol(&self) -> BlockSymbol {
        let (nx, ny, sx, sy) = self.dims();
        let mut diags = vec![vec![C64::default(); nx * ny]; sx * sy];
        for term in &self.terms {
            for ix in 0..sx {
                for iy in 0..sy {
                    let d = &mut diags[ix * sy + iy];
                    let dx = &term.x.diags()[ix];
                    let dy = &term.y.diags()[iy];
                    for kx in 0..nx {
                        let ax = dx[kx] * term.coef;
                        for ky in 0..ny {
                            d[kx * ny + ky] += ax * dy[ky];
                        }
                    }
                }
            }
        }
        BlockSymbol {
            n: nx * ny,
            diags,
            layout: SymbolLayout::Tensor { nx, ny, sx, sy },
        }
    }

    pub fn pinv(&self) -> Result<SymbolPinv> {
        symbol_pinv(&self.to_block_symbol())
    }
}

/// Symbol of the Helmholtz operator `∂²ₓ + ∂²ᵧ + k₀²` on the tensor basis:
/// `B₂ˣ⊗B₀ʸ + B₀ˣ⊗B₂ʸ + k₀² B₀ˣ⊗B₀ʸ`.
pub fn helmholtz_symbol_2d(
    spec_x: &KernelSpec,
    spec_y: &KernelSpec,
    dims: (usize, usize, usize, usize),
    k0sq: f64,
) -> Result<TensorSymbol> {
    if !k0sq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "k0² must be finite, got {k0sq}"
        )));
    }
    let (nx, ny, sx, sy) = dims;
    let x0 = assemble_symbol(spec_x, nx, sx, Derivative::Value)?;
    let x2 = assemble_symbol(spec_x, nx, sx, Derivative::Second)?;
    let y0 = assemble_symbol(spec_y, ny, sy, Derivative::Value)?;
    let y2 = assemble_symbol(spec_y, ny, sy, Derivative::Second)?;
    TensorSymbol::new(vec![
        TensorTerm {
            coef: 1.0,
            x: x2,
            y: y0.clone(),
        },
        TensorTerm {
            coef: 1.0,
            x: x0.clone(),
            y: y2,
        },
        TensorTerm {
            coef: k0sq,
            x: x0,
            y: y0,
        },
    ])
}

/// FFT-backed actions of the periodic collocation matrix `Aᶜ = Π*P*BF*`,
/// its pseudo-inverse `F B† P Π` and the projector `Aᶜ(Aᶜ)†` on the full
/// block-ordered grid.
#[derive(Debug, Clone)]
pub struct CirculantOperator {
    symbol: BlockSymbol,
    pinv: SymbolPinv,
    plan: SpectralPlan,
    /// Full-grid index of entry 0 of each block; entry `(kx, ky)` of block
    /// `b` sits at `block_base[b] + kx·ly + ky`.
    block_base: Vec<usize>,
    ly: usize,
}

impl CirculantOperator {
    pub fn new(symbol: BlockSymbol) -> Result<Self> {
        let pinv = symbol_pinv(&symbol)?;
        let (nx, ny, sx, sy) = symbol.dims();
        let ly = sy * ny;
        let block_base = (0..sx)
            .flat_map(|ix| (0..sy).map(move |iy| ix * nx * ly + iy * ny))
            .collect();
        Ok(Self {
            plan: SpectralPlan::new(nx, ny),
            symbol,
            pinv,
            block_base,
            ly,
        })
    }

    pub fn from_tensor(symbol: &TensorSymbol) -> Result<Self> {
        Self::new(symbol.to_block_symbol())
    }

    pub fn symbol(&self) -> &BlockSymbol {
        &self.symbol
    }

    pub fn pinv_symbol(&self) -> &SymbolPinv {
        &self.pinv
    }

    /// Number of coefficients `N`.
    pub fn n(&self) -> usize {
        self.symbol.n()
    }

    /// Number of full-grid points `L = sN`.
    pub fn full_len(&self) -> usize {
        self.symbol.n() * self.symbol.s()
    }

    fn gather_block(&self, full: &[f64], b: usize) -> Vec<C64> {
        let (_, ny, _, _) = self.symbol.dims();
        let base = self.block_base[b];
        let nx = self.symbol.n() / ny;
        let mut out = Vec::with_capacity(self.symbol.n());
        for kx in 0..nx {
            let row = base + kx * self.ly;
            out.extend(full[row..row + ny].iter().map(|&v| C64::new(v, 0.0)));
        }
        out
    }

    fn scatter_block(&self, block: &[C64], b: usize, full: &mut [f64]) {
        let (_, ny, _, _) = self.symbol.dims();
        let base = self.block_base[b];
        for (kx, chunk) in block.chunks_exact(ny).enumerate() {
            let row = base + kx * self.ly;
            for (dst, v) in full[row..row + ny].iter_mut().zip(chunk) {
                *dst = v.re;
            }
        }
    }

    fn spectrum_of(&self, coeffs: &[f64]) -> Vec<C64> {
        let mut a: Vec<C64> = coeffs.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.plan.forward(&mut a);
        a
    }

    /// Full grid values `∑_b ifft(m_b ⊙ ŵ)/N` placed block by block.
    fn synthesize(&self, multipliers: &[Vec<C64>], spectrum: &[C64], conj: bool) -> Vec<f64> {
        let n = self.n() as f64;
        let mut full = vec![0.0; self.full_len()];
        for (b, m) in multipliers.iter().enumerate() {
            let mut block: Vec<C64> = if conj {
                m.iter().zip(spectrum).map(|(d, a)| d.conj() * a).collect()
            } else {
                m.iter().zip(spectrum).map(|(d, a)| d * a).collect()
            };
            self.plan.inverse(&mut block);
            block.iter_mut().for_each(|c| *c /= n);
            self.scatter_block(&block, b, &mut full);
        }
        full
    }

    /// `∑_b m_b ⊙ fft(y_b)` over the blocks of a full-grid vector.
    fn analyze(&self, multipliers: &[Vec<C64>], full: &[f64], conj: bool) -> Vec<C64> {
        let mut acc = vec![C64::default(); self.n()];
        for (b, m) in multipliers.iter().enumerate() {
            let mut block = self.gather_block(full, b);
            self.plan.forward(&mut block);
            for ((a, d), v) in acc.iter_mut().zip(m).zip(&block) {
                *a += if conj { d.conj() * v } else { d * v };
            }
        }
        acc
    }

    /// `Aᶜ a`: coefficients to values on the full block-ordered grid.
    pub fn forward(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len("periodic forward input", self.n(), coeffs.len())?;
        let spectrum = self.spectrum_of(coeffs);
        Ok(self.synthesize(self.symbol.diags(), &spectrum, false))
    }

    /// `(Aᶜ)ᵀ y`.
    pub fn forward_adjoint(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_len("periodic adjoint input", self.full_len(), values.len())?;
        let spectrum = self.analyze(self.symbol.diags(), values, true);
        Ok(self.from_spectrum(&spectrum))
    }

    /// Spectrum `ŵ = Σ_b d̃_b ⊙ fft(y_b)` of the periodic least-squares
    /// solution; coefficients are `ifft(ŵ)/N`.
    pub fn pinv_spectrum(&self, values: &[f64]) -> Result<Vec<C64>> {
        check_len("pseudo-inverse input", self.full_len(), values.len())?;
        Ok(self.analyze(self.pinv.diags_tilde(), values, false))
    }

    /// Coefficients from a spectrum, with the largest discarded imaginary
    /// part.
    pub fn from_spectrum_complex(&self, spectrum: &[C64]) -> (Vec<f64>, f64) {
        let n = self.n() as f64;
        let mut w = spectrum.to_vec();
        self.plan.inverse(&mut w);
        let max_imag = w.iter().fold(0.0f64, |m, c| m.max((c.im / n).abs()));
        (w.iter().map(|c| c.re / n).collect(), max_imag)
    }

    pub fn from_spectrum(&self, spectrum: &[C64]) -> Vec<f64> {
        self.from_spectrum_complex(spectrum).0
    }

    /// `(Aᶜ)† y`, the exact periodic least-squares solution.
    pub fn pinv(&self, values: &[f64]) -> Result<Vec<f64>> {
        let spectrum = self.pinv_spectrum(values)?;
        Ok(self.from_spectrum(&spectrum))
    }

    /// `((Aᶜ)†)ᵀ a`.
    pub fn pinv_adjoint(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len("pseudo-inverse adjoint input", self.n(), coeffs.len())?;
        let spectrum = self.spectrum_of(coeffs);
        Ok(self.pinv_adjoint_spectrum(&spectrum))
    }

    /// `((Aᶜ)†)ᵀ a` given `fft(a)` directly.
    pub fn pinv_adjoint_spectrum(&self, spectrum: &[C64]) -> Vec<f64> {
        self.synthesize(self.pinv.diags_tilde(), spectrum, true)
    }

    /// `Aᶜ (Aᶜ)† y = Π*P* B B† P Π y`, evaluated without leaving the
    /// Fourier domain between the two factors. The projector `BB†` has
    /// entries bounded by one, so the result is accurate to roundoff even
    /// where `B†` alone is huge.
    pub fn projector(&self, values: &[f64]) -> Result<Vec<f64>> {
        let spectrum = self.pinv_spectrum(values)?;
        Ok(self.project_spectrum(&spectrum))
    }

    /// Full grid values `Aᶜ ifft(ŵ)/N` computed as `∑_b ifft(d_b ⊙ ŵ)/N`.
    pub fn project_spectrum(&self, spectrum: &[C64]) -> Vec<f64> {
        self.synthesize(self.symbol.diags(), spectrum, false)
    }
}

/// Result of the exact periodic solver.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSolution {
    pub coefficients: Vec<f64>,
    /// Largest imaginary part dropped when extracting real coefficients.
    pub max_imag: f64,
}

/// Least-squares solution of `Aᶜ a = b` for data on the full block-ordered
/// grid: blockwise FFT, symbol pseudo-inverse, one inverse FFT.
pub fn periodic_solve(symbol: &BlockSymbol, rhs: &[f64]) -> Result<PeriodicSolution> {
    let op = CirculantOperator::new(symbol.clone())?;
    let spectrum = op.pinv_spectrum(rhs)?;
    let (coefficients, max_imag) = op.from_spectrum_complex(&spectrum);
    Ok(PeriodicSolution {
        coefficients,
        max_imag,
    })
}
