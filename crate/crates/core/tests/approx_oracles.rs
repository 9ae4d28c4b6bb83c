use azrbf::approx::{
    build_approx_problem_1d, build_approx_problem_2d, evaluate_expansion, max_error, ApproxConfig,
    AxisConfig, Discretization, Expansion, ReferenceFn,
};
use azrbf::azcore::{az_solve, to_dense, SolverConfig};
use azrbf::circulant::periodic_solve;
use azrbf::geometry::Domain;
use azrbf::kernel::{Derivative, KernelSpec};
use azrbf::Error;
use proptest::prelude::*;

mod common;

fn solve(cfg: &ApproxConfig, f: impl Fn(f64, f64) -> f64 + Sync) -> (Discretization, Vec<f64>) {
    let disc = Discretization::new(cfg).unwrap();
    let b = disc.sample(f);
    let p = disc.build_problem(&b).unwrap();
    let rep = az_solve(&p, &SolverConfig::default()).unwrap();
    (disc, rep.solution)
}

fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

#[test]
fn full_box_az_equals_periodic_solve_1d() {
    let cfg = ApproxConfig::new_1d(32, 2, 1.0, 1e-10, Domain::Interval { lo: -1.0, hi: 1.0 });
    let f = ReferenceFn::Per1d.bind(32, 0);
    let (disc, x) = solve(&cfg, f);
    assert_eq!(disc.m(), 64);
    let per = periodic_solve(&disc.value_symbol().unwrap(), &disc.sample(f)).unwrap();
    assert!(max_rel_diff(&x, &per.coefficients) < 1e-10);
}

#[test]
fn full_box_az_equals_periodic_solve_2d() {
    let cfg = ApproxConfig::new_2d(
        AxisConfig::new(12, 2, 1.0),
        AxisConfig::new(10, 2, 0.8),
        1e-5,
        Domain::Rectangle { hx: 1.0, hy: 0.8 },
    );
    let f = |x: f64, y: f64| (2.0 * x).sin() * (1.0 + y * y);
    let (disc, x) = solve(&cfg, f);
    assert_eq!(disc.m(), cfg.full_len());
    let per = periodic_solve(&disc.value_symbol().unwrap(), &disc.sample(f)).unwrap();
    assert!(max_rel_diff(&x, &per.coefficients) < 1e-9);
}

#[test]
fn fast_operator_matches_entrywise_assembly_on_interval() {
    let cfg = ApproxConfig::new_1d(8, 2, 1.5, 1e-10, Domain::unit_interval());
    let disc = Discretization::new(&cfg).unwrap();
    let p = build_approx_problem_1d(&cfg, &vec![0.0; disc.m()]).unwrap();
    let fast = to_dense(p.a().as_ref()).unwrap();
    let exact = common::entrywise_values(&disc);
    assert!(fast.max_abs_diff(&exact) < 1e-12);
}

#[test]
fn fast_operator_matches_entrywise_assembly_on_ellipse() {
    let cfg = ApproxConfig::new_2d(
        AxisConfig::new(6, 2, 1.4),
        AxisConfig::new(6, 2, 0.7),
        1e-5,
        Domain::Ellipse { a: 1.0, b: 0.5 },
    );
    let disc = Discretization::new(&cfg).unwrap();
    let p = build_approx_problem_2d(&cfg, &vec![0.0; disc.m()]).unwrap();
    let fast = to_dense(p.a().as_ref()).unwrap();
    let exact = common::entrywise_values(&disc);
    assert!(fast.max_abs_diff(&exact) < 1e-12);
    // Adjoint of the fast action against the transposed dense matrix.
    let fast_t = to_dense(&Transposed(p.a().clone())).unwrap();
    for i in 0..exact.nrows() {
        for j in 0..exact.ncols() {
            assert!((fast_t.get(j, i) - exact.get(i, j)).abs() < 1e-12);
        }
    }
}

struct Transposed(azrbf::azcore::OperatorHandle);

impl azrbf::azcore::LinearOperator for Transposed {
    fn nrows(&self) -> usize {
        self.0.ncols()
    }
    fn ncols(&self) -> usize {
        self.0.nrows()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.apply_adjoint(x)
    }
    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.0.apply(y)
    }
}

#[test]
fn oversampling_must_exceed_coefficient_count() {
    let cfg = ApproxConfig::new_1d(16, 1, 1.0, 1e-10, Domain::unit_interval());
    assert!(matches!(
        Discretization::new(&cfg),
        Err(Error::InsufficientOversampling { .. })
    ));
}

#[test]
fn naive_evaluation_agrees_with_windowed_sum() {
    let n = 16;
    let spec = KernelSpec::linear_regime(n, 1.5, 1e-10).unwrap();
    let coeffs: Vec<f64> = (0..n).map(|j| ((j * 7 % 5) as f64 - 2.0) * 0.3).collect();
    let e = Expansion::new_1d(coeffs.clone(), spec, n).unwrap();
    let pts: Vec<[f64; 2]> = (0..200)
        .map(|i| [-2.0 + 4.0 * i as f64 / 199.0, 0.0])
        .collect();
    let fast = evaluate_expansion(&e, &pts);
    for (v, &[x, _]) in fast.iter().zip(&pts) {
        let naive: f64 = (0..n)
            .map(|j| coeffs[j] * common::basis(&spec, n, j, x, Derivative::Value))
            .sum();
        assert!((v - naive).abs() < 1e-13, "x={x}");
    }

    let (nx, ny) = (5, 4);
    let kx = KernelSpec::linear_regime(nx, 1.4, 1e-5).unwrap();
    let ky = KernelSpec::linear_regime(ny, 0.7, 1e-5).unwrap();
    let c2: Vec<f64> = (0..nx * ny).map(|j| (j as f64 * 0.37).sin()).collect();
    let e2 = Expansion::new_2d(c2.clone(), (kx, nx), (ky, ny)).unwrap();
    for i in 0..50 {
        let (x, y) = (-1.4 + 2.8 * i as f64 / 49.0, 0.7 - 1.1 * i as f64 / 49.0);
        let mut naive = 0.0;
        for jx in 0..nx {
            for jy in 0..ny {
                naive += c2[jx * ny + jy]
                    * common::basis(&kx, nx, jx, x, Derivative::Value)
                    * common::basis(&ky, ny, jy, y, Derivative::Value);
            }
        }
        assert!((e2.evaluate_at(x, y) - naive).abs() < 1e-13);
    }
}

#[test]
fn expansion_trivial_cases() {
    let n = 10;
    let spec = KernelSpec::linear_regime(n, 1.0, 1e-10).unwrap();
    let pts: Vec<[f64; 2]> = (0..30).map(|i| [-1.0 + i as f64 / 15.0, 0.0]).collect();
    let zero = Expansion::new_1d(vec![0.0; n], spec, n).unwrap();
    assert!(evaluate_expansion(&zero, &pts).iter().all(|&v| v == 0.0));

    let mut unit = vec![0.0; n];
    unit[3] = 1.0;
    let e = Expansion::new_1d(unit, spec, n).unwrap();
    for (v, &[x, _]) in evaluate_expansion(&e, &pts).iter().zip(&pts) {
        assert!((v - spec.periodized(x - (-1.0 + 0.6), Derivative::Value)).abs() < 1e-15);
    }

    let same = |x: f64, _: f64| e.evaluate_at(x, 0.0);
    assert_eq!(max_error(&e, &same, &pts), 0.0);

    // A constant expansion: all coefficients equal sum to a periodic constant.
    let c = Expansion::new_1d(vec![1.0; n], spec, n).unwrap();
    let level = c.evaluate_at(0.0, 0.0);
    let shifted = move |_: f64, _: f64| level + 1e-3;
    let err = max_error(&c, &shifted, &pts);
    assert!((err - 1e-3).abs() < 1e-9, "{err}");
}

#[test]
fn nonperiodic_coefficients_stay_bounded() {
    for n in [64usize, 256] {
        let cfg = ApproxConfig::new_1d(n, 2, 1.5, 1e-10, Domain::unit_interval());
        let f = ReferenceFn::Non1d.bind(n, 0);
        let (disc, x) = solve(&cfg, f);
        let scaled = common::norm(&x) / (n as f64).sqrt();
        assert!(scaled < 1.0, "n={n}: {scaled}");
        let e = disc.expansion(x).unwrap();
        let err = max_error(&e, &f, &disc.probe_points());
        assert!(err <= 1e-8, "n={n}: {err}");
    }
}

#[test]
fn periodic_fit_is_near_machine_precision() {
    let n = 256;
    let cfg = ApproxConfig::new_1d(n, 3, 1.0, 1e-10, Domain::unit_interval());
    let f = ReferenceFn::Per1d.bind(n, 0);
    let (disc, x) = solve(&cfg, f);
    let e = disc.expansion(x).unwrap();
    assert!(max_error(&e, &f, &disc.probe_points()) < 1e-10);
}

#[test]
fn probe_points_lie_inside_domain() {
    let cfg = ApproxConfig::new_2d(
        AxisConfig::new(10, 2, 1.4),
        AxisConfig::new(8, 2, 0.7),
        1e-5,
        Domain::Ellipse { a: 1.0, b: 0.5 },
    );
    let pts = Discretization::new(&cfg).unwrap().probe_points();
    assert!(!pts.is_empty());
    assert!(pts.iter().all(|&[x, y]| x * x + 4.0 * y * y <= 1.0 + 1e-12));
}

proptest! {
    #[test]
    fn interval_collocation_points_are_grid_points_inside(
        n in 4usize..64,
        s in 2usize..4,
        lo in -1.4f64..-0.2,
        hi in 0.2f64..1.4,
    ) {
        let cfg = ApproxConfig::new_1d(n, s, 1.5, 1e-10, Domain::Interval { lo, hi });
        if let Ok(disc) = Discretization::new(&cfg) {
            let h = 3.0 / (n * s) as f64;
            for &[x, _] in disc.points() {
                prop_assert!(x >= lo && x <= hi);
                let k = (x + 1.5) / h;
                prop_assert!((k - k.round()).abs() < 1e-9);
            }
            prop_assert!(disc.m() > n);
        }
    }
}
