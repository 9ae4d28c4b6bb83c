use std::sync::Arc;

use azrbf::approx::{build_approx_problem_1d, ApproxConfig, ReferenceFn};
use azrbf::azcore::{
    az_solve, dense_tsvd_lsq, norm2, numerical_rank, randomized_lsq, residual_norm, to_dense,
    AZProblem, DenseMatrix, LinearOperator, ProblemMeta, SolverConfig, ZeroOperator,
};
use azrbf::geometry::Domain;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    DenseMatrix::from_row_major(rows, cols, data).unwrap()
}

fn random_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Sum of `rank` random outer products.
fn low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> DenseMatrix {
    let u = random_matrix(rows, rank, seed);
    let v = random_matrix(rank, cols, seed + 1);
    common::matmul(&u, &v)
}

#[test]
fn identity_problem_returns_rhs() {
    let n = 12;
    let b = random_vec(n, 3);
    let id = DenseMatrix::identity(n).into_handle();
    let p = AZProblem::new(
        id.clone(),
        id,
        b.clone(),
        3,
        ProblemMeta::generic(n, n, 1e-10),
    )
    .unwrap();
    let rep = az_solve(&p, &SolverConfig::default()).unwrap();
    for (x, y) in rep.solution.iter().zip(&b) {
        assert!((x - y).abs() < 1e-14);
    }
    assert_eq!(rep.step1_rank, 0);
}

#[test]
fn exact_inverse_makes_step_one_vanish() {
    let n = 8;
    let a = random_matrix(n, n, 11);
    let ainv = {
        let m = common::to_nalgebra(&a).try_inverse().unwrap();
        DenseMatrix::from_fn(n, n, |i, j| m[(i, j)])
    };
    let b = random_vec(n, 12);
    let p = AZProblem::new(
        a.clone().into_handle(),
        ainv.clone().into_handle(),
        b.clone(),
        2,
        ProblemMeta::generic(n, n, 1e-10),
    )
    .unwrap();
    let step1 = to_dense(p.step1_operator().as_ref()).unwrap();
    assert!(step1.max_abs() < 1e-12);
    let rep = az_solve(&p, &SolverConfig::default()).unwrap();
    let oracle = common::qr_lstsq(&a, &b);
    for (x, y) in rep.solution.iter().zip(&oracle) {
        assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
    }
}

#[test]
fn randomized_lsq_matches_dense_on_rank_three_operator() {
    let a = low_rank(40, 30, 3, 21);
    let rhs = random_vec(40, 22);
    let sol = randomized_lsq(&a, &rhs, 3, 10, 1e-12, 5).unwrap();
    assert_eq!(sol.effective_rank, 3);
    assert!(!sol.saturated);
    let dense = dense_tsvd_lsq(&a, &rhs, 1e-12).unwrap();
    let r_rand = common::residual(&a, &sol.x, &rhs);
    let r_dense = common::residual(&a, &dense, &rhs);
    assert!((r_rand - r_dense).abs() < 1e-8, "{r_rand} vs {r_dense}");
}

#[test]
fn randomized_lsq_trivial_inputs() {
    let a = low_rank(30, 20, 4, 31);
    let zero_rhs = vec![0.0; 30];
    let sol = randomized_lsq(&a, &zero_rhs, 4, 10, 1e-12, 1).unwrap();
    assert!(sol.x.iter().all(|&v| v == 0.0));

    let z = ZeroOperator {
        nrows: 30,
        ncols: 20,
    };
    let sol = randomized_lsq(&z, &random_vec(30, 2), 4, 10, 1e-12, 1).unwrap();
    assert_eq!(sol.effective_rank, 0);
    assert!(sol.x.iter().all(|&v| v == 0.0));
}

#[test]
fn randomized_lsq_flags_saturation_and_oversized_sketch() {
    let a = random_matrix(30, 20, 41);
    let sol = randomized_lsq(&a, &random_vec(30, 42), 2, 3, 1e-12, 1).unwrap();
    assert!(sol.saturated);
    assert_eq!(sol.effective_rank, 5);
    assert!(randomized_lsq(&a, &random_vec(30, 42), 15, 10, 1e-12, 1).is_err());
}

#[test]
fn dense_tsvd_trivial_cases() {
    let id = DenseMatrix::identity(7);
    let rhs = random_vec(7, 51);
    let x = dense_tsvd_lsq(&id, &rhs, 1e-14).unwrap();
    for (u, v) in x.iter().zip(&rhs) {
        assert!((u - v).abs() < 1e-14);
    }

    let mut u = random_vec(9, 52);
    let mut v = random_vec(6, 53);
    let (nu, nv) = (norm2(&u), norm2(&v));
    u.iter_mut().for_each(|x| *x /= nu);
    v.iter_mut().for_each(|x| *x /= nv);
    let a = DenseMatrix::from_fn(9, 6, |i, j| u[i] * v[j]);
    let x = dense_tsvd_lsq(&a, &u, 1e-14).unwrap();
    for (p, q) in x.iter().zip(&v) {
        assert!((p - q).abs() < 1e-13);
    }
}

#[test]
fn dense_tsvd_matches_qr_reference() {
    for seed in 0..5 {
        let a = random_matrix(20, 12, 100 + seed);
        let rhs = random_vec(20, 200 + seed);
        let x = dense_tsvd_lsq(&a, &rhs, 1e-14).unwrap();
        let oracle = common::qr_lstsq(&a, &rhs);
        let r1 = common::residual(&a, &x, &rhs);
        let r2 = common::residual(&a, &oracle, &rhs);
        assert!((r1 - r2).abs() < 1e-10);
        for (p, q) in x.iter().zip(&oracle) {
            assert!((p - q).abs() < 1e-10);
        }
    }
}

#[test]
fn dense_tsvd_refuses_oversized_systems() {
    let a = DenseMatrix::zeros(1, 4001);
    assert!(dense_tsvd_lsq(&a, &[0.0], 1e-14).is_err());
}

#[test]
fn numerical_rank_counts_outer_products() {
    let a = low_rank(50, 40, 5, 61);
    let est = numerical_rank(&a, 1e-10, 20, 3).unwrap();
    assert_eq!(est.rank, 5);
    assert!(!est.saturated);

    let z = ZeroOperator {
        nrows: 10,
        ncols: 10,
    };
    assert_eq!(numerical_rank(&z, 1e-10, 10, 3).unwrap().rank, 0);

    let full = random_matrix(30, 30, 62);
    let est = numerical_rank(&full, 1e-10, 10, 3).unwrap();
    assert!(est.saturated);
}

proptest! {
    #[test]
    fn dense_operator_adjoint_is_consistent(
        rows in 1usize..20,
        cols in 1usize..20,
        seed in 0u64..1000,
    ) {
        let a = random_matrix(rows, cols, seed);
        let u = random_vec(cols, seed + 1);
        let v = random_vec(rows, seed + 2);
        let lhs: f64 = a.apply(&u).iter().zip(&v).map(|(x, y)| x * y).sum();
        let rhs: f64 = u.iter().zip(&a.apply_adjoint(&v)).map(|(x, y)| x * y).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn reported_residual_matches_recomputation(seed in 0u64..200) {
        let a = random_matrix(30, 12, seed);
        let z = random_matrix(12, 30, seed + 7);
        let b = random_vec(30, seed + 9);
        let p = AZProblem::new(a.clone().into_handle(), z.into_handle(), b.clone(), 2, ProblemMeta::generic(12, 30, 1e-10)).unwrap();
        let rep = az_solve(&p, &SolverConfig::with_seed(seed)).unwrap();
        let r = residual_norm(&a, &rep.solution, &b).unwrap();
        prop_assert!((r - rep.residual_norm).abs() <= 1e-12 * (1.0 + r));
        prop_assert!((rep.coef_norm - norm2(&rep.solution)).abs() <= 1e-12 * (1.0 + rep.coef_norm));
    }
}

#[test]
fn problem_construction_checks_dimensions() {
    let a = DenseMatrix::zeros(5, 3).into_handle();
    let z = DenseMatrix::zeros(3, 5).into_handle();
    let bad_z = DenseMatrix::zeros(5, 3).into_handle();
    let meta = ProblemMeta::generic(3, 5, 1e-10);
    assert!(AZProblem::new(a.clone(), bad_z, vec![0.0; 5], 1, meta).is_err());
    assert!(AZProblem::new(a.clone(), z.clone(), vec![0.0; 4], 1, meta).is_err());
    assert!(AZProblem::new(a.clone(), z.clone(), vec![0.0; 5], 0, meta).is_err());
    let p = AZProblem::new(a, z, vec![f64::NAN; 5], 1, meta).unwrap();
    assert!(az_solve(&p, &SolverConfig::default()).is_err());
}

fn approx_1d(n: usize) -> AZProblem {
    let cfg = ApproxConfig::new_1d(n, 2, 1.5, 1e-10, Domain::Interval { lo: -1.0, hi: 1.0 });
    let f = ReferenceFn::Non1d.bind(n, 0);
    let disc = azrbf::approx::Discretization::new(&cfg).unwrap();
    let samples = disc.sample(f);
    build_approx_problem_1d(&cfg, &samples).unwrap()
}

#[test]
fn az_residual_is_within_lemma_bound_of_dense() {
    for n in [64usize, 128, 256] {
        let p = approx_1d(n);
        let rep = az_solve(&p, &SolverConfig::default()).unwrap();
        let a = to_dense(p.a().as_ref()).unwrap();
        let x = dense_tsvd_lsq(&a, p.b(), 1e-10).unwrap();
        let r_dense = common::residual(&a, &x, p.b());
        let bound = 2.0 * r_dense + 10.0 * 1e-10 * norm2(p.b());
        assert!(
            rep.residual_norm <= bound,
            "n={n}: {} > {bound}",
            rep.residual_norm
        );
    }
}

#[test]
fn seeded_solves_are_deterministic() {
    let p = approx_1d(128);
    let a = az_solve(&p, &SolverConfig::with_seed(9)).unwrap();
    let b = az_solve(&p, &SolverConfig::with_seed(9)).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.step1_rank, b.step1_rank);
}

#[test]
fn projector_norms_obey_lemma_bounds() {
    for n in [16usize, 32, 64] {
        let p = approx_1d(n);
        let az = to_dense(p.projector().as_ref()).unwrap();
        let comp = to_dense(p.complement().as_ref()).unwrap();
        let az_norm = az.spectral_norm().unwrap();
        let comp_norm = comp.spectral_norm().unwrap();
        assert!(az_norm <= 1.0 + 1e-8, "n={n}: {az_norm}");
        assert!(comp_norm <= 2.0 + 1e-8, "n={n}: {comp_norm}");
    }
}

#[test]
fn handles_are_shareable_across_threads() {
    let a: Arc<dyn LinearOperator> = random_matrix(10, 10, 5).into_handle();
    let v = random_vec(10, 6);
    let expect = a.apply(&v);
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let a = a.clone();
            let v = v.clone();
            std::thread::spawn(move || a.apply(&v))
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), expect);
    }
}
