use std::time::Instant;

use boxl0::baselines::{l1_merit, solve_pga_observed, solve_piht_with, PihtOptions};
use boxl0::linalg::DenseMatrix;
use boxl0::operators::inner;
use boxl0::prox::{prox_l0_box, prox_objective_1d, prox_oracle_1d};
use boxl0::solver::{default_params, solve_bnl0r, solve_bnl0r_observed};
use boxl0::stationarity::partition_indices;
use boxl0::{
    BoxBounds, ComposedMap, DenseLeastSquares64, HaarDirection, HaarMap, IdentityMap, IterationRecord, LeastSquaresObjective, LinearMap,
    PartialDftMap, Problem,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::args::{SelftestArgs, Suite};
use crate::{CliError, CliResult};

const SEED: u64 = 0x5e1f;

/// Outcome of one suite: number of checks and the first failure, if any.
type Outcome = Result<usize, String>;

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn complex_normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Scalar prox against a grid search; the fault shifts the solver's answer.
fn prox_suite(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cases = 500;
    for c in 0..cases {
        let l: f64 = rng.random_range(0.1..2.0);
        let u: f64 = rng.random_range(0.1..2.0);
        let tl = rng.random_range(0.01..0.49) * l.min(u).powi(2);
        let z = rng.random_range(-3.0..3.0);
        let bounds = BoxBounds::new(vec![l], vec![u]).map_err(|e| e.to_string())?;
        let mut y = prox_l0_box(&[z], tl, &bounds).map_err(|e| e.to_string())?[0];
        if fault {
            y += 1e-3;
        }
        let oracle = prox_oracle_1d(z, tl, l, u, 1e-3);
        let (hy, ho) = (prox_objective_1d(y, z, tl), prox_objective_1d(oracle, z, tl));
        if !(-l..=u).contains(&y) || hy > ho + 1e-12 {
            return Err(format!("case {c}: prox({z:.4}) = {y:.6}, oracle {oracle:.6}"));
        }
    }
    Ok(cases)
}

fn check_adjoint<M: LinearMap<f64, Complex64>>(name: &str, map: &M, rng: &mut ChaCha8Rng, fault: bool) -> Outcome {
    let trials = 3;
    for _ in 0..trials {
        let x = complex_normals(rng, map.ncols());
        let y = complex_normals(rng, map.nrows());
        let mut back = map.adjoint_apply(&y);
        if fault {
            back[0] += Complex64::new(1e-3, 0.0);
        }
        let lhs = inner::<f64, Complex64>(&map.apply(&x), &y);
        let rhs = inner::<f64, Complex64>(&x, &back);
        if (lhs - rhs).norm() > 1e-10 * (1.0 + lhs.norm()) {
            return Err(format!("{name}: <Ax,y> = {lhs:.6e}, <x,A*y> = {rhs:.6e}"));
        }
    }
    Ok(trials)
}

/// `<Ax, y> = <x, A*y>` for every operator family.
fn adjoint_suite(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let err = |e: boxl0::Error| e.to_string();
    let dense = DenseMatrix::from_col_major(12, 20, normals(&mut rng, 240)).ok_or("dense shape")?;
    let dft = PartialDftMap::<f64>::random(256, 64, SEED).map_err(err)?;
    let haar = HaarMap::new(16, HaarDirection::Inverse).map_err(err)?;
    let composed = ComposedMap::new::<f64, Complex64>(
        PartialDftMap::<f64>::random(256, 64, SEED + 1).map_err(err)?,
        HaarMap::with_levels(16, 3, HaarDirection::Inverse).map_err(err)?,
    )
    .map_err(err)?;
    let mut n = check_adjoint("dense", &dense, &mut rng, fault)?;
    n += check_adjoint("partial dft", &dft, &mut rng, fault)?;
    n += check_adjoint("haar", &haar, &mut rng, fault)?;
    n += check_adjoint("dft∘haar", &composed, &mut rng, fault)?;
    Ok(n)
}

/// Every index lands in exactly one class, and the class agrees with its
/// defining inequality.
fn partition_suite(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let rounds = 50;
    for r in 0..rounds {
        let n = 40;
        let lower: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let upper: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let bounds = BoxBounds::new(lower.clone(), upper.clone()).map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..n).map(|i| rng.random_range(-lower[i]..=upper[i])).collect();
        let g = normals(&mut rng, n);
        let tau = rng.random_range(0.05..0.5);
        let lambda = rng.random_range(0.01..0.49) * bounds.a() / (2.0 * tau);
        let mut p = partition_indices(&x, &g, tau, lambda, &bounds).map_err(|e| e.to_string())?;
        if fault {
            if let Some(i) = p.theta.pop() {
                p.ibar.push(i);
            } else if let Some(i) = p.ibar.pop() {
                p.theta.push(i);
            }
        }
        let mut seen = vec![0u8; n];
        for &i in p.theta.iter().chain(&p.gamma_u).chain(&p.gamma_l).chain(&p.ibar) {
            seen[i] += 1;
        }
        if let Some(i) = seen.iter().position(|&c| c != 1) {
            return Err(format!("round {r}: index {i} appears {} times", seen[i]));
        }
        let thr = (2.0 * tau * lambda).sqrt();
        let class = |i: usize| {
            let z = x[i] - tau * g[i];
            if z >= upper[i] {
                0
            } else if z <= -lower[i] {
                1
            } else if z.abs() >= thr {
                2
            } else {
                3
            }
        };
        for (k, set) in [&p.gamma_u, &p.gamma_l, &p.theta, &p.ibar].into_iter().enumerate() {
            if let Some(&i) = set.iter().find(|&&i| class(i) != k) {
                return Err(format!("round {r}: index {i} misclassified"));
            }
        }
    }
    Ok(rounds)
}

fn quadratic_problem(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Result<Problem<f64, DenseLeastSquares64>, String> {
    let m = 2 * n;
    let scale = 1.0 / (m as f64).sqrt();
    let a = DenseMatrix::from_col_major(m, n, normals(rng, m * n).into_iter().map(|v| v * scale).collect())
        .ok_or("shape")?;
    let b = normals(rng, m);
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let upper: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let obj = LeastSquaresObjective::new(a, b).map_err(|e| e.to_string())?;
    let bounds = BoxBounds::new(lower, upper).map_err(|e| e.to_string())?;
    Problem::new(obj, bounds, 0.05).map_err(|e| e.to_string())
}

/// Feasible iterates and monotone merit along all three solvers.
fn descent_suite(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut steps = 0usize;
    let mut failure: Option<String> = None;
    for round in 0..5 {
        let problem = quadratic_problem(&mut rng, 30)?;
        let mut params = default_params(&problem, 100, round).map_err(|e| e.to_string())?;
        params.max_iter = 200;
        for solver in ["BNL0R", "PIHT", "PGA"] {
            let l1 = solver == "PGA";
            let mut observe = |rec: &IterationRecord<'_, f64>| {
                steps += 1;
                if failure.is_some() {
                    return;
                }
                let merit = |x: &[f64]| {
                    if l1 {
                        l1_merit(&problem.objective, x, rec.lambda)
                    } else {
                        problem.merit(x, rec.lambda)
                    }
                };
                let before = merit(rec.x_prev);
                let mut after = merit(rec.x_next);
                if fault {
                    after += 1e-3 * (1.0 + before.abs());
                }
                if !problem.bounds.contains(rec.x_next) {
                    failure = Some(format!("{solver}: iterate {} left the box", rec.k));
                } else if after > before + 1e-12 * (1.0 + before.abs()) {
                    failure = Some(format!("{solver}: merit rose from {before:e} to {after:e} at step {}", rec.k));
                }
            };
            let result = match solver {
                "BNL0R" => solve_bnl0r_observed(&problem, &params, None, &mut observe),
                "PIHT" => solve_piht_with(&problem, &params, None, &PihtOptions::default(), Some(&mut observe)),
                _ => solve_pga_observed(&problem, &params, None, Some(&mut observe)),
            };
            result.map_err(|e| format!("{solver}: {e}"))?;
        }
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(steps),
    }
}

/// With `A = I` the problem separates; each coordinate must match the
/// one-dimensional global minimizer.
fn identity_suite(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (n, bound, lambda) = (50, 2.0, 1e-3);
    let b: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.5) {
                0.0
            } else {
                rng.random_range(1.0..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }
            }
        })
        .collect();
    let obj = LeastSquaresObjective::<f64, f64, _>::new(IdentityMap { n }, b.clone()).map_err(|e| e.to_string())?;
    let problem =
        Problem::new(obj, BoxBounds::symmetric(n, bound).map_err(|e| e.to_string())?, lambda).map_err(|e| e.to_string())?;
    let params = default_params(&problem, 50, SEED).map_err(|e| e.to_string())?;
    let report = solve_bnl0r(&problem, &params, None).map_err(|e| e.to_string())?;
    for (i, (&xi, &bi)) in report.x_final.iter().zip(&b).enumerate() {
        let mut expected = prox_oracle_1d(bi, lambda, bound, bound, 1e-3);
        if fault {
            expected += 1e-3;
        }
        if (xi - expected).abs() > 1e-8 {
            return Err(format!("coordinate {i}: got {xi}, expected {expected}"));
        }
    }
    Ok(n)
}

pub fn run(args: SelftestArgs) -> CliResult {
    let suites = [
        (Suite::Prox, "prox", prox_suite as fn(bool) -> Outcome),
        (Suite::Adjoint, "adjoint", adjoint_suite),
        (Suite::Partition, "partition", partition_suite),
        (Suite::Descent, "descent", descent_suite),
        (Suite::Identity, "identity", identity_suite),
    ];
    let mut failed = 0;
    for (suite, name, check) in suites {
        if args.suite.is_some_and(|s| s != suite) {
            continue;
        }
        let start = Instant::now();
        match check(args.inject_fault) {
            Ok(count) => outln!("PASS {name:<10} {count:>6} checks  {:.2}s", start.elapsed().as_secs_f64()),
            Err(msg) => {
                failed += 1;
                outln!("FAIL {name:<10} {msg}");
            }
        }
    }
    if failed > 0 {
        return Err(CliError::failure(format!("{failed} suite(s) failed")));
    }
    Ok(())
}
