use boxl0::baselines::{solve_pga, solve_piht};
use boxl0::linalg::{dist, DenseMatrix};
use boxl0::operators::IdentityMap;
use boxl0::solver::{default_params, estimate_lipschitz, lambda_bounds, solve_bnl0r};
use boxl0::stationarity::check_tau_stationary;
use boxl0::{BoxBounds, LeastSquaresObjective, Problem, SmoothObjective, StopReason};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Spurious correlations are about `1/√m`, so small instances need a larger
/// share of the penalty bound than the benchmark default.
const LAMBDA_FRACTION: f64 = 0.05;

type Dense = LeastSquaresObjective<f64, f64, DenseMatrix<f64>>;

/// Unit-norm Gaussian columns, `s` nonzeros of magnitude in `[0.5, 2]`.
fn tiny_instance(n: usize, m: usize, s: usize, seed: u64) -> (Problem<f64, Dense>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DenseMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    for j in 0..n {
        let c = a.col_mut(j);
        let nrm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        c.iter_mut().for_each(|v| *v /= nrm);
    }
    let mut xs = vec![0.0; n];
    for i in sample(&mut rng, n, s) {
        let mag = 0.5 + 1.5 * rng.random::<f64>();
        xs[i] = if rng.random::<bool>() { mag } else { -mag };
    }
    let b = a.mul_vec(&xs);
    let obj = LeastSquaresObjective::new(a, b).unwrap();
    let bounds = BoxBounds::symmetric(n, 3.0).unwrap();
    let l_hat = estimate_lipschitz(&obj, 200, seed);
    let lambda = LAMBDA_FRACTION * lambda_bounds(&obj, &bounds, l_hat).unwrap().upper;
    let problem = Problem::new(obj, bounds, lambda).unwrap();
    (problem, xs)
}

#[test]
fn bnl0r_recovers_tiny_sparse_signal() {
    for seed in 0..5 {
        let (problem, xs) = tiny_instance(100, 40, 2, seed);
        let mut params = default_params(&problem, 200, seed).unwrap();
        params.tol_rel = 1e-12;
        let r = solve_bnl0r(&problem, &params, None).unwrap();
        assert!(dist(&r.x_final, &xs) < 1e-8, "seed {seed}: res {}", dist(&r.x_final, &xs));
        assert_eq!(r.nnz, 2);
        assert!(r.newton_steps > 0);
        assert!(r.iterations <= 30);
    }
}

#[test]
fn baselines_run_on_tiny_instance() {
    let (problem, xs) = tiny_instance(100, 40, 2, 11);
    let params = default_params(&problem, 200, 11).unwrap();
    let piht = solve_piht(&problem, &params, None).unwrap();
    let pga = solve_pga(&problem, &params, None).unwrap();
    assert!(dist(&piht.x_final, &xs) < 1e-2);
    assert!(problem.bounds.contains(&pga.x_final));
    // the ℓ1 relaxation shrinks the magnitudes
    assert!(dist(&pga.x_final, &xs) > dist(&piht.x_final, &xs));
}

#[test]
fn separable_problem_is_solved_exactly() {
    let obj = LeastSquaresObjective::<f64, f64, _>::new(IdentityMap { n: 3 }, vec![1.0, 0.0, 0.0]).unwrap();
    let problem = Problem::new(obj, BoxBounds::symmetric(3, 3.0).unwrap(), 1e-6).unwrap();
    let params = default_params(&problem, 50, 0).unwrap();
    let r = solve_bnl0r(&problem, &params, None).unwrap();
    assert!(dist(&r.x_final, &[1.0, 0.0, 0.0]) < 1e-12);
    assert!(r.residual_norm < 1e-12);
    let g = problem.objective.gradient(&r.x_final);
    assert!(check_tau_stationary(&r.x_final, &g, r.tau_final, r.lambda_final, &problem.bounds, 1e-8).unwrap());
}

#[test]
fn bound_active_solution_is_pinned() {
    // the unconstrained minimizer (5, −4) lies outside the box [−1, 2]²
    let obj = LeastSquaresObjective::<f64, f64, _>::new(IdentityMap { n: 2 }, vec![5.0, -4.0]).unwrap();
    let bounds = BoxBounds::new(vec![1.0, 1.0], vec![2.0, 2.0]).unwrap();
    let problem = Problem::new(obj, bounds, 1e-3).unwrap();
    let params = default_params(&problem, 50, 0).unwrap();
    let r = solve_bnl0r(&problem, &params, None).unwrap();
    assert_eq!(r.x_final, vec![2.0, -1.0]);
}

#[test]
fn large_penalty_returns_zero() {
    let obj = LeastSquaresObjective::<f64, f64, _>::new(IdentityMap { n: 3 }, vec![0.1, -0.2, 0.05]).unwrap();
    let problem = Problem::new(obj, BoxBounds::symmetric(3, 1.0).unwrap(), 1.0).unwrap();
    let params = default_params(&problem, 50, 0).unwrap();
    let r = solve_bnl0r(&problem, &params, None).unwrap();
    assert_eq!(r.nnz, 0);
}

#[test]
fn objective_tolerance_stops_at_origin_when_already_met() {
    let obj = LeastSquaresObjective::<f64, f64, _>::new(IdentityMap { n: 2 }, vec![1e-8, 0.0]).unwrap();
    let problem = Problem::new(obj, BoxBounds::symmetric(2, 1.0).unwrap(), 1e-3).unwrap();
    let mut params = default_params(&problem, 50, 0).unwrap();
    params.tol_f = 1e-10;
    let r = solve_bnl0r(&problem, &params, None).unwrap();
    assert_eq!(r.stop, StopReason::ObjectiveTolerance);
    assert_eq!(r.iterations, 0);
}

#[test]
fn infeasible_start_is_rejected() {
    let (problem, _) = tiny_instance(100, 40, 2, 0);
    let params = default_params(&problem, 50, 0).unwrap();
    let mut x0 = vec![0.0; 100];
    x0[7] = 4.0;
    assert!(solve_bnl0r(&problem, &params, Some(&x0)).is_err());
}
