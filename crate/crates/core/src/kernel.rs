//! Gaussian radial basis function, its derivatives and its periodization.
//!
//! The kernel is `φ(r) = exp(-ε² r²)`. Periodized basis functions are built by
//! summing translates `φ(x - 2mT)` over all integers `m`; only translates whose
//! contribution survives binary64 rounding are evaluated.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Unit roundoff of binary64.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Exponent cutoff `-ln(u) + 4`: Gaussian factors `exp(-q)` with `q` above
/// this value are dropped.
pub fn exponent_cutoff() -> f64 {
    -UNIT_ROUNDOFF.ln() + 4.0
}

/// Derivative order of a univariate kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Derivative {
    Value,
    First,
    Second,
}

impl Derivative {
    pub fn order(self) -> u8 {
        match self {
            Derivative::Value => 0,
            Derivative::First => 1,
            Derivative::Second => 2,
        }
    }
}

impl TryFrom<u8> for Derivative {
    type Error = Error;

    fn try_from(order: u8) -> Result<Self> {
        match order {
            0 => Ok(Derivative::Value),
            1 => Ok(Derivative::First),
            2 => Ok(Derivative::Second),
            other => Err(Error::InvalidParameter(format!(
                "derivative order must be 0, 1 or 2, got {other}"
            ))),
        }
    }
}

/// Proportionality constant `c` of the linear regime `ε = c N`.
///
/// `c = π / (2T √(2 ln(1 + τ₀⁻²)))`, which places the smallest Fourier
/// coefficient of the sampled kernel at the level of `τ₀`.
pub fn shape_constant(half_period: f64, tau0: f64) -> Result<f64> {
    check_half_period(half_period)?;
    check_tau0(tau0)?;
    // ln(1 + τ⁻²) = -2 ln τ + ln(1 + τ²), stable for tiny τ.
    let log_term = -2.0 * tau0.ln() + tau0.powi(2).ln_1p();
    Ok(PI / (2.0 * half_period * (2.0 * log_term).sqrt()))
}

/// Bandwidth `W = (1/π) √(-2 ln δ · ln(1 + τ₀⁻²))`: the number of neighbouring
/// centers over which a kernel stays above `δ` in the linear regime.
pub fn bandwidth(delta: f64, tau0: f64) -> Result<f64> {
    check_tau0(tau0)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation tolerance must lie in (0, 1), got {delta}"
        )));
    }
    let log_term = -2.0 * tau0.ln() + tau0.powi(2).ln_1p();
    Ok((-2.0 * delta.ln() * log_term).sqrt() / PI)
}

fn check_half_period(half_period: f64) -> Result<()> {
    if half_period > 0.0 && half_period.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "half-period T must be positive and finite, got {half_period}"
        )))
    }
}

fn check_tau0(tau0: f64) -> Result<()> {
    if tau0 > 0.0 && tau0 < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "regularization threshold tau0 must lie in (0, 1), got {tau0}"
        )))
    }
}

/// Gaussian `exp(-ε² r²)` or one of its first two derivatives in `r`.
pub fn kernel_eval(r: f64, epsilon: f64, order: Derivative) -> f64 {
    let e2 = epsilon * epsilon;
    let g = (-e2 * r * r).exp();
    match order {
        Derivative::Value => g,
        Derivative::First => -2.0 * e2 * r * g,
        Derivative::Second => -2.0 * e2 * g * (1.0 - 2.0 * e2 * r * r),
    }
}

/// Shape parameter, half-period of the bounding box and regularization
/// threshold of a periodized Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    epsilon: f64,
    half_period: f64,
    tau0: f64,
}

impl KernelSpec {
    pub fn new(epsilon: f64, half_period: f64, tau0: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shape parameter must be positive and finite, got {epsilon}"
            )));
        }
        check_half_period(half_period)?;
        check_tau0(tau0)?;
        Ok(Self {
            epsilon,
            half_period,
            tau0,
        })
    }

    /// Kernel in the linear regime `ε = shape_constant(T, τ₀) · N`.
    pub fn linear_regime(n: usize, half_period: f64, tau0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "number of centers must be positive".into(),
            ));
        }
        let c = shape_constant(half_period, tau0)?;
        Self::new(c * n as f64, half_period, tau0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn eval(&self, r: f64, order: Derivative) -> f64 {
        kernel_eval(r, self.epsilon, order)
    }

    /// Distance beyond which a single translate is below the unit roundoff.
    pub fn support_radius(&self) -> f64 {
        exponent_cutoff().sqrt() / self.epsilon
    }

    /// The `2T`-periodic sum `Σₘ φ⁽ᵒ⁾(x - 2mT)`.
    pub fn periodized(&self, x: f64, order: Derivative) -> f64 {
        let period = 2.0 * self.half_period;
        let xr = x - period * (x / period).round();
        let reach = self.support_radius();
        let m_lo = ((xr - reach) / period).ceil() as i64;
        let m_hi = ((xr + reach) / period).floor() as i64;
        (m_lo..=m_hi)
            .map(|m| self.eval(xr - m as f64 * period, order))
            .sum()
    }

    /// Continuous Fourier transform `∫ φ⁽ᵒ⁾(y) e^{-2πiyξ} dy` of the
    /// (non-periodized) kernel derivative, returned as `(re, im)`.
    pub fn fourier_transform(&self, xi: f64, order: Derivative) -> (f64, f64) {
        let e = self.epsilon;
        let base = PI.sqrt() / e * (-(PI * xi / e).powi(2)).exp();
        let w = 2.0 * PI * xi;
        match order {
            Derivative::Value => (base, 0.0),
            // (2πiξ) φ̂
            Derivative::First => (0.0, w * base),
            // (2πiξ)² φ̂
            Derivative::Second => (-w * w * base, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_constant_reference_values() {
        // Values from an independent high-precision evaluation of
        // π / (2T sqrt(2 ln(1 + 1e20))).
        let c1 = shape_constant(1.0, 1e-10).unwrap();
        assert!((c1 - 0.163_674_882_197_169_25).abs() < 1e-14, "{c1}");
        let c2 = shape_constant(2.0, 1e-10).unwrap();
        assert!((c2 - c1 / 2.0).abs() < 1e-15);
        let c15 = shape_constant(1.5, 1e-10).unwrap();
        assert!((c15 - 0.109_116_588_131_446_17).abs() < 1e-14, "{c15}");
    }

    #[test]
    fn shape_constant_rejects_bad_input() {
        assert!(shape_constant(0.0, 1e-10).is_err());
        assert!(shape_constant(-1.0, 1e-10).is_err());
        assert!(shape_constant(1.0, 0.0).is_err());
        assert!(shape_constant(1.0, 1.0).is_err());
        assert!(shape_constant(1.0, f64::NAN).is_err());
    }

    #[test]
    fn shape_constant_is_monotone() {
        let ts = [0.5, 1.0, 1.4, 2.0, 3.0];
        for w in ts.windows(2) {
            assert!(shape_constant(w[0], 1e-8).unwrap() > shape_constant(w[1], 1e-8).unwrap());
        }
        let taus = [1e-14, 1e-10, 1e-5, 1e-2, 0.5];
        for w in taus.windows(2) {
            assert!(shape_constant(1.0, w[0]).unwrap() < shape_constant(1.0, w[1]).unwrap());
        }
    }

    #[test]
    fn bandwidth_matches_hand_evaluation() {
        // sqrt(-2 ln 1e-12 * ln(1 + 1e20)) / π ≈ 16.06
        let w = bandwidth(1e-12, 1e-10).unwrap();
        assert!((w - 16.06).abs() < 0.01, "{w}");
        assert_eq!((4.0 * w).ceil() as usize, 65);
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_eval(0.0, 3.0, Derivative::Value), 1.0);
        assert_eq!(kernel_eval(0.0, 1.0, Derivative::Second), -2.0);
        assert!((kernel_eval(0.5, 2.0, Derivative::Value) - (-1.0f64).exp()).abs() < 1e-16);
        assert!((kernel_eval(0.5, 2.0, Derivative::Value) - 0.367_879).abs() < 1e-6);
        assert_eq!(kernel_eval(0.0, 2.0, Derivative::First), 0.0);
    }

    #[test]
    fn periodized_brute_force_reference() {
        let spec = KernelSpec::new(1.0, 1.0, 1e-10).unwrap();
        let brute: f64 = (-10i32..=10)
            .map(|m| (-(2.0 * m as f64).powi(2)).exp())
            .sum();
        let v = spec.periodized(0.0, Derivative::Value);
        assert!((v - brute).abs() < 1e-15);
        assert!((v - 1.036_631_5).abs() < 1e-7, "{v}");
    }

    #[test]
    fn periodized_is_periodic_and_even() {
        let spec = KernelSpec::new(2.3, 1.5, 1e-10).unwrap();
        for i in 0..50 {
            let x = -4.0 + 0.173 * i as f64;
            for order in [Derivative::Value, Derivative::First, Derivative::Second] {
                let a = spec.periodized(x, order);
                let b = spec.periodized(x + 3.0, order);
                assert!((a - b).abs() < 1e-13 * (1.0 + a.abs()), "x={x}");
            }
            let a = spec.periodized(x, Derivative::Value);
            let b = spec.periodized(-x, Derivative::Value);
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn truncation_tail_is_below_roundoff() {
        let spec = KernelSpec::linear_regime(64, 1.5, 1e-10).unwrap();
        let period = 3.0;
        for i in 0..40 {
            let x = -1.5 + 0.075 * i as f64;
            let reach = spec.support_radius();
            let m_hi = ((x + reach) / period).floor() as i64;
            let retained = spec.periodized(x, Derivative::Value);
            let first_omitted = spec.eval(x - (m_hi + 1) as f64 * period, Derivative::Value);
            assert!(first_omitted <= UNIT_ROUNDOFF * retained.max(1.0));
        }
    }

    #[test]
    fn fourier_transform_of_value_integrates_to_area() {
        let spec = KernelSpec::new(1.7, 1.0, 1e-10).unwrap();
        let (re, im) = spec.fourier_transform(0.0, Derivative::Value);
        assert!((re - PI.sqrt() / 1.7).abs() < 1e-15);
        assert_eq!(im, 0.0);
    }
}
