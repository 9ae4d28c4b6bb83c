use azrbf::kernel::{kernel_eval, Derivative, KernelSpec};
use proptest::prelude::*;

mod common;

fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[test]
fn derivatives_match_finite_differences() {
    let eps = 3.0;
    let h = 1e-5;
    for i in 0..100 {
        let r = -1.0 + 2.0 * i as f64 / 99.0;
        let d1 = kernel_eval(r, eps, Derivative::First);
        let fd1 = central_difference(|x| kernel_eval(x, eps, Derivative::Value), r, h);
        let scale1 = d1.abs().max(1.0);
        assert!((d1 - fd1).abs() < 1e-6 * scale1, "r={r}: {d1} vs {fd1}");

        let d2 = kernel_eval(r, eps, Derivative::Second);
        let fd2 = central_difference(|x| kernel_eval(x, eps, Derivative::First), r, h);
        let scale2 = d2.abs().max(1.0);
        assert!((d2 - fd2).abs() < 1e-6 * scale2, "r={r}: {d2} vs {fd2}");
    }
}

proptest! {
    #[test]
    fn periodized_matches_brute_force(
        eps in 0.5f64..40.0,
        t in 0.5f64..2.0,
        x in -5.0f64..5.0,
        order in 0u8..3,
    ) {
        let spec = KernelSpec::new(eps, t, 1e-10).unwrap();
        let order = Derivative::try_from(order).unwrap();
        let fast = spec.periodized(x, order);
        let brute = common::brute_periodized(&spec, x, order);
        let scale = spec.eval(0.0, Derivative::Second).abs().max(1.0);
        prop_assert!((fast - brute).abs() <= 1e-14 * scale);
    }

    #[test]
    fn periodized_derivative_matches_difference_quotient(
        n in 16usize..256,
        x in -1.5f64..1.5,
    ) {
        let spec = KernelSpec::linear_regime(n, 1.5, 1e-10).unwrap();
        let h = 1e-5 / spec.epsilon();
        let fd = central_difference(|y| spec.periodized(y, Derivative::Value), x, h);
        let d1 = spec.periodized(x, Derivative::First);
        prop_assert!((fd - d1).abs() <= 1e-6 * spec.epsilon());
    }

    #[test]
    fn shape_parameter_is_linear_in_n(n in 1usize..5000, t in 0.1f64..5.0) {
        let a = KernelSpec::linear_regime(n, t, 1e-10).unwrap();
        let b = KernelSpec::linear_regime(2 * n, t, 1e-10).unwrap();
        prop_assert!((b.epsilon() - 2.0 * a.epsilon()).abs() <= 1e-12 * b.epsilon());
    }
}
