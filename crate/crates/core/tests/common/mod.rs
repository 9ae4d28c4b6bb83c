#![allow(dead_code)]

use azrbf::approx::Discretization;
use azrbf::azcore::DenseMatrix;
use azrbf::kernel::{kernel_eval, Derivative, KernelSpec};
use nalgebra::{DMatrix, DVector};

/// Periodized kernel summed over a generous fixed range of translates,
/// independent of the library's truncation rule.
pub fn brute_periodized(spec: &KernelSpec, x: f64, order: Derivative) -> f64 {
    let period = 2.0 * spec.half_period();
    (-60i32..=60)
        .map(|m| kernel_eval(x - m as f64 * period, spec.epsilon(), order))
        .sum()
}

/// `φ⁽ᵒ⁾_j(x)` for centers `c_j = -T + 2Tj/n`.
pub fn basis(spec: &KernelSpec, n: usize, j: usize, x: f64, order: Derivative) -> f64 {
    let t = spec.half_period();
    let c = -t + 2.0 * t * j as f64 / n as f64;
    brute_periodized(spec, x - c, order)
}

/// Entrywise collocation matrix of function values at the kept points.
pub fn entrywise_values(disc: &Discretization) -> DenseMatrix {
    let (nx, ny, _, _) = disc.config().dims();
    let kx = *disc.kernel_x();
    let ky = disc.kernel_y().copied();
    let pts = disc.points().to_vec();
    DenseMatrix::from_fn(pts.len(), nx * ny, |i, j| {
        let [x, y] = pts[i];
        match &ky {
            None => basis(&kx, nx, j, x, Derivative::Value),
            Some(ky) => {
                basis(&kx, nx, j / ny, x, Derivative::Value)
                    * basis(ky, ny, j % ny, y, Derivative::Value)
            }
        }
    })
}

pub fn to_nalgebra(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a.get(i, j))
}

/// Least-squares solution of a full-column-rank system through a
/// Householder QR factorization.
pub fn qr_lstsq(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let m = to_nalgebra(a);
    let qr = m.qr();
    let qtb = qr.q().transpose() * DVector::from_column_slice(b);
    let x = qr
        .r()
        .solve_upper_triangular(&qtb)
        .expect("full column rank");
    x.iter().copied().collect()
}

pub fn residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> f64 {
    (0..a.nrows())
        .map(|i| {
            let r: f64 = a.row(i).iter().zip(x).map(|(u, v)| u * v).sum::<f64>() - b[i];
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.ncols(), b.nrows());
    DenseMatrix::from_fn(a.nrows(), b.ncols(), |i, j| {
        (0..a.ncols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
    })
}
