//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Arguments act as filters on criterion ids (`c1` … `c10`). The optional
//! full-scale image run is enabled with `BOXL0_FULL_SCALE=1`.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use boxl0::baselines::{l1_merit, solve_pga_observed, solve_piht_with, PihtOptions};
use boxl0::bench::{
    gen_e1, run_experiment, run_trial, summarize, write_csv, Algorithm, CellSummary, Experiment, ExperimentConfig,
    TrialResult,
};
use boxl0::linalg::{dist, dot, norm, norm_sq, DenseMatrix};
use boxl0::model::IterationRecord;
use boxl0::operators::{haar_forward, haar_inverse, inner, materialize, power_iteration};
use boxl0::prox::{prox_l0_box, prox_objective_1d, prox_oracle_1d};
use boxl0::solver::{estimate_lipschitz, lambda_bounds, quad_form_full, quad_form_reduced, solve_bnl0r_observed};
use boxl0::{
    BoxBounds, ComposedMap, HaarDirection, HaarMap, LeastSquaresObjective, LinearMap, PartialDftMap, Problem,
    SmoothObjective, SolverParams, StepKind,
};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Dense = LeastSquaresObjective<f64, f64, DenseMatrix<f64>>;

const BATCH_TRIALS: usize = 20;
/// Master seeds of the extra n = 1000 batches used for the ordering check.
const ORDERING_SEEDS: [u64; 3] = [101, 202, 303];
const MAIN_SEED: u64 = 2024;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Benchmark batches are expensive, so criteria that read the same cell share
/// one run.
#[derive(Default)]
struct Batches {
    cache: HashMap<(Experiment, usize, u64), Vec<TrialResult>>,
}

impl Batches {
    fn get(&mut self, experiment: Experiment, n: usize, seed: u64) -> &[TrialResult] {
        self.cache.entry((experiment, n, seed)).or_insert_with(|| {
            let started = Instant::now();
            let mut config = ExperimentConfig::new(experiment, vec![n]);
            config.trials = BATCH_TRIALS;
            config.master_seed = seed;
            config.jobs = Some(1);
            let rows = run_experiment(&config).expect("valid batch configuration");
            eprintln!(
                "  [batch {} n={n} seed={seed}: {:.1} s]",
                experiment.as_str(),
                started.elapsed().as_secs_f64()
            );
            rows
        })
    }
}

fn cell(cells: &[CellSummary], alg: Algorithm) -> &CellSummary {
    cells.iter().find(|c| c.algorithm == alg).expect("algorithm present")
}

fn failures(rows: &[TrialResult]) -> usize {
    rows.iter().filter(|r| r.error.is_some()).count()
}

fn c1_noise_free(batches: &mut Batches) -> Verdict {
    let rows = batches.get(Experiment::E1, 5000, MAIN_SEED);
    let cells = summarize(rows);
    let (b, p, g) = (
        cell(&cells, Algorithm::Bnl0r),
        cell(&cells, Algorithm::Piht),
        cell(&cells, Algorithm::Pga),
    );
    let worst_time = rows
        .iter()
        .filter(|r| r.algorithm == Algorithm::Bnl0r)
        .map(|r| r.time_s)
        .fold(0.0, f64::max);
    let mean_iter = rows
        .iter()
        .filter(|r| r.algorithm == Algorithm::Bnl0r)
        .map(|r| r.iter as f64)
        .sum::<f64>()
        / BATCH_TRIALS as f64;
    let pass = failures(rows) == 0
        && b.res <= 1e-10
        && mean_iter <= 10.0
        && worst_time <= 5.0
        && p.res <= 1e-6
        && g.res >= 1e-3;
    Verdict::new(
        pass,
        format!(
            "E1 n=5000: BNL0R res {:.2e} iter {mean_iter:.1} max time {worst_time:.2} s; PIHT res {:.2e}; PGA res {:.2e}",
            b.res, p.res, g.res
        ),
    )
}

fn ordered(rows: &[TrialResult]) -> (bool, [f64; 3]) {
    let cells = summarize(rows);
    let r = [
        cell(&cells, Algorithm::Bnl0r).res,
        cell(&cells, Algorithm::Piht).res,
        cell(&cells, Algorithm::Pga).res,
    ];
    (failures(rows) == 0 && r[0] < r[1] && r[1] < r[2], r)
}

fn c2_ordering(batches: &mut Batches) -> Verdict {
    let mut plan: Vec<(Experiment, usize, u64)> = Vec::new();
    for exp in [Experiment::E1, Experiment::E2] {
        plan.extend(ORDERING_SEEDS.iter().map(|&s| (exp, 1000, s)));
        plan.push((exp, 5000, MAIN_SEED));
    }
    let mut good = 0;
    let mut notes = Vec::new();
    for &(exp, n, seed) in &plan {
        let (ok, r) = ordered(batches.get(exp, n, seed));
        good += usize::from(ok);
        if !ok {
            notes.push(format!("{} n={n} seed={seed}: {:.2e}/{:.2e}/{:.2e}", exp.as_str(), r[0], r[1], r[2]));
        }
    }
    let frac = good as f64 / plan.len() as f64;
    let mut detail = format!("BNL0R < PIHT < PGA in {good}/{} batches ({:.0}%)", plan.len(), 100.0 * frac);
    if !notes.is_empty() {
        detail.push_str(&format!("; out of order: {}", notes.join(", ")));
    }
    Verdict::new(frac >= 0.8, detail)
}

fn c3_noisy(batches: &mut Batches) -> Verdict {
    let rows = batches.get(Experiment::E2, 5000, MAIN_SEED);
    let cells = summarize(rows);
    let b = cell(&cells, Algorithm::Bnl0r);
    let pass = b.failures == 0 && (1e-4..=5e-2).contains(&b.res);
    Verdict::new(pass, format!("E2 n=5000 SNR 30 dB: BNL0R mean res {:.2e}", b.res))
}

/// Desk check at `m = n/2`. At the large-scale ratio `m ≈ 0.22n` the 64×64
/// phantom has too few measurements per nonzero and the homotopy settles at
/// a spurious stationary point near 23 dB.
const DESK_M_RATIO: f64 = 0.5;
const DESK_LAMBDA_FRACTION: f64 = 1e-4;
const FULL_SCALE_BUDGET: Duration = Duration::from_secs(600);

fn c4_image() -> Verdict {
    let mut config = ExperimentConfig::new(Experiment::E4, vec![64 * 64]);
    config.m_ratio = DESK_M_RATIO;
    config.nf = 0.0;
    config.lambda_fraction = Some(DESK_LAMBDA_FRACTION);
    config.algorithms = vec![Algorithm::Bnl0r];
    config.master_seed = MAIN_SEED;
    let desk = run_trial(&config, 64 * 64, 0);
    let desk_psnr = desk[0].psnr.unwrap_or(f64::NAN);
    let desk_ok = desk_psnr >= 40.0;
    let mut detail = format!("64×64 phantom nf=0: BNL0R PSNR {desk_psnr:.1} dB");

    if std::env::var_os("BOXL0_FULL_SCALE").is_none() {
        detail.push_str("; 256×256 run skipped (set BOXL0_FULL_SCALE=1)");
        return Verdict::new(desk_ok, detail);
    }
    let mut full = ExperimentConfig::new(Experiment::E4, vec![256 * 256]);
    full.algorithms = vec![Algorithm::Bnl0r, Algorithm::Pga];
    full.master_seed = MAIN_SEED;
    let started = Instant::now();
    let rows = run_trial(&full, 256 * 256, 0);
    let elapsed = started.elapsed();
    let psnr = |a: Algorithm| {
        rows.iter()
            .find(|r| r.algorithm == a)
            .and_then(|r| r.psnr)
            .unwrap_or(f64::NAN)
    };
    let (b, g) = (psnr(Algorithm::Bnl0r), psnr(Algorithm::Pga));
    let full_ok = b >= 22.0 && b > g && elapsed <= FULL_SCALE_BUDGET;
    detail.push_str(&format!(
        "; 256×256 m=14369 nf=0.05: BNL0R {b:.2} dB, PGA {g:.2} dB in {:.0} s",
        elapsed.as_secs_f64()
    ));
    Verdict::new(desk_ok && full_ok, detail)
}

fn c5_prox_oracle() -> Verdict {
    const GRID: f64 = 1e-4;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_gap: f64 = 0.0;
    let mut below_grid = true;
    for _ in 0..1000 {
        let l: f64 = rng.random_range(0.1..3.0);
        let u: f64 = rng.random_range(0.1..3.0);
        let a = (l * l).min(u * u);
        let tl = rng.random_range(0.0..0.5) * a;
        let z = rng.random_range(-1.5 * l..1.5 * u);
        let bounds = BoxBounds::new(vec![l], vec![u]).expect("positive bounds");
        let y = prox_l0_box(&[z], tl, &bounds).expect("threshold below bounds")[0];
        let h = prox_objective_1d(y, z, tl);
        let h_oracle = prox_objective_1d(prox_oracle_1d(z, tl, l, u, GRID), z, tl);
        worst_gap = worst_gap.max((h - h_oracle).abs());
        // a plain grid scan never beats the closed form
        let steps = ((l + u) / GRID) as usize;
        let grid_min = (0..=steps)
            .map(|k| prox_objective_1d((-l + k as f64 * GRID).min(u), z, tl))
            .fold(prox_objective_1d(0.0, z, tl), f64::min);
        below_grid &= h <= grid_min + 1e-12;
    }
    let secs = started.elapsed().as_secs_f64();
    Verdict::new(
        worst_gap <= GRID && below_grid && secs < 5.0,
        format!("1000 cases: max |h(prox) − h(oracle)| {worst_gap:.1e}, never above grid minimum: {below_grid}, {secs:.2} s"),
    )
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(rows, cols, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

fn params_for(problem: &Problem<f64, Dense>, lambda_fraction: f64, seed: u64) -> (SolverParams<f64>, f64) {
    let l_hat = estimate_lipschitz(&problem.objective, 200, seed);
    let upper = lambda_bounds(&problem.objective, &problem.bounds, l_hat)
        .expect("nonzero gradient")
        .upper;
    let mut params = SolverParams::new(l_hat, upper / 2.0);
    params.max_iter = 300;
    (params, lambda_fraction * upper)
}

/// Tall Gaussian design (strongly convex) with asymmetric bounds; the
/// generating vector overshoots the box so some bounds are active.
fn quadratic_instance(seed: u64) -> Problem<f64, Dense> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(10..=200);
    let m = 2 * n;
    let a = gaussian(&mut rng, m, n, 1.0 / (m as f64).sqrt());
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let upper: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut z = vec![0.0; n];
    for i in sample(&mut rng, n, n.div_ceil(4)) {
        z[i] = rng.random_range(-3.0..3.0);
    }
    let b = a.mul_vec(&z);
    let obj = LeastSquaresObjective::new(a, b).expect("matching shapes");
    let bounds = BoxBounds::new(lower, upper).expect("positive bounds");
    Problem::new(obj, bounds, 1.0).expect("valid problem")
}

fn c6_descent() -> Verdict {
    let mut violations: Vec<String> = Vec::new();
    let mut steps = 0usize;
    let mut pinned = 0usize;
    for seed in 0..50u64 {
        let mut problem = quadratic_instance(seed);
        let (params, lambda) = params_for(&problem, 0.01, seed);
        problem.lambda_target = lambda;
        let bounds = problem.bounds.clone();
        let obj = &problem.objective;
        for alg in Algorithm::ALL {
            let mut check = |rec: &IterationRecord<'_, f64>| {
                steps += 1;
                let tag = format!("seed {seed} {} k={}", alg.as_str(), rec.k);
                if !bounds.contains(rec.x_next) {
                    violations.push(format!("{tag}: infeasible"));
                }
                let merit = |x: &[f64]| match alg {
                    Algorithm::Pga => l1_merit(obj, x, rec.lambda),
                    _ => obj.value(x) + rec.lambda * boxl0::linalg::nnz(x) as f64,
                };
                let (before, after) = (merit(rec.x_prev), merit(rec.x_next));
                if after > before + 1e-12 * (1.0 + before.abs()) {
                    violations.push(format!("{tag}: merit rose {before:e} -> {after:e}"));
                }
                if let Some(p) = rec.partition {
                    pinned += p.gamma_u.len() + p.gamma_l.len();
                    let up = p.gamma_u.iter().all(|&i| rec.x_next[i] == bounds.hi(i));
                    let lo = p.gamma_l.iter().all(|&i| rec.x_next[i] == bounds.lo(i));
                    if !(up && lo) {
                        violations.push(format!("{tag}: active set not pinned"));
                    }
                }
            };
            let run = match alg {
                Algorithm::Bnl0r => solve_bnl0r_observed(&problem, &params, None, &mut check),
                Algorithm::Piht => {
                    solve_piht_with(&problem, &params, None, &PihtOptions::default(), Some(&mut check))
                }
                Algorithm::Pga => solve_pga_observed(&problem, &params, None, Some(&mut check)),
            };
            if let Err(e) = run {
                violations.push(format!("seed {seed} {}: {e}", alg.as_str()));
            }
        }
    }
    let mut detail = format!("50 instances, {steps} steps, {pinned} pinned indices, {} violations", violations.len());
    if let Some(first) = violations.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    Verdict::new(violations.is_empty() && pinned > 0, detail)
}

/// Sparse recovery instance with the design matrix kept for the oracle.
fn recovery_instance(seed: u64) -> (Problem<f64, Dense>, DenseMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m, s) = (200, 80, 4);
    let a = gaussian(&mut rng, m, n, 1.0 / (m as f64).sqrt());
    let mut x = vec![0.0; n];
    for i in sample(&mut rng, n, s) {
        x[i] = rng.random_range(0.5..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    let b = a.mul_vec(&x);
    let obj = LeastSquaresObjective::new(a.clone(), b).expect("matching shapes");
    let problem = Problem::new(obj, BoxBounds::symmetric(n, 3.0).expect("positive"), 1.0).expect("valid");
    (problem, a)
}

fn c7_lemma_identity() -> Verdict {
    const WANT: usize = 100;
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for seed in 0..1000u64 {
        if checked >= WANT {
            break;
        }
        let (mut problem, a) = if seed % 2 == 0 {
            recovery_instance(seed)
        } else {
            let p = quadratic_instance(seed + 1000);
            let a = p.objective.map().clone();
            (p, a)
        };
        let (params, lambda) = params_for(&problem, 0.05, seed);
        problem.lambda_target = lambda;
        let gram = a.transpose().matmul(&a);
        let obj = &problem.objective;
        let mut check = |rec: &IterationRecord<'_, f64>| {
            let Some(bundle) = rec.bundle.filter(|b| b.kind == StepKind::Newton) else {
                return;
            };
            let full = quad_form_full(obj, rec.x_prev, bundle);
            let reduced = quad_form_reduced(obj, rec.x_prev, bundle, rec.prev_support);
            let (Ok(full), Ok(reduced)) = (full, reduced) else {
                errors.push(format!("seed {seed}: quadratic form failed"));
                return;
            };
            // explicit Gram matrix rows for Θ
            let d = &bundle.d;
            let theta_part: f64 = bundle.theta.iter().map(|&i| d[i] * dot(gram.col(i), d)).sum();
            let oracle = theta_part + norm_sq(&bundle.d_gamma()) + norm_sq(&bundle.d_ibar());
            let scale = oracle.abs().max(f64::MIN_POSITIVE);
            worst = worst.max((full - reduced).abs() / scale).max((full - oracle).abs() / scale);
            checked += 1;
        };
        if let Err(e) = solve_bnl0r_observed(&problem, &params, None, &mut check) {
            errors.push(format!("seed {seed}: {e}"));
        }
    }
    Verdict::new(
        checked >= WANT && worst <= 1e-10 && errors.is_empty(),
        format!("{checked} Newton bundles, max relative disagreement {worst:.1e}"),
    )
}

/// Below this the 1.5-power bound asks for more digits than double precision
/// carries, so the next error is only required to reach the same floor.
const ROUNDOFF_FLOOR: f64 = 1e-12;

fn c8_quadratic_tail() -> Verdict {
    let mut checks = 0;
    let mut sharp = 0;
    let mut short = 0;
    let mut bad = Vec::new();
    for trial in 0..20u64 {
        let seed = 8000 + trial;
        let inst = gen_e1(1000, 0.25, seed).expect("valid E1 size");
        let mut params = ExperimentConfig::new(Experiment::E1, vec![1000]).params_for(&inst);
        // keep iterating past the exact hit so the tail can be observed
        params.tol_f = 0.0;
        let xs = &inst.groundtruth;
        let floor = ROUNDOFF_FLOOR * (1.0 + norm(xs));
        let mut trace: Vec<(f64, f64, StepKind, Vec<usize>)> = Vec::new();
        let mut record = |rec: &IterationRecord<'_, f64>| {
            let support = rec.partition.map(|p| p.support()).unwrap_or_default();
            trace.push((dist(rec.x_prev, xs), dist(rec.x_next, xs), rec.kind, support));
        };
        if let Err(e) = solve_bnl0r_observed(&inst.problem, &params, None, &mut record) {
            bad.push(format!("seed {seed}: {e}"));
            continue;
        }
        for (before, after, kind, _) in &trace {
            if *kind != StepKind::Newton || *before > 1e-3 {
                continue;
            }
            checks += 1;
            let bound = before.powf(1.5);
            if bound > floor {
                sharp += 1;
            }
            if *after > bound.max(floor) {
                bad.push(format!("seed {seed}: {before:.2e} -> {after:.2e}"));
            }
        }
        // a run that lands exactly on x* can end before a third iterate exists
        let tail = &trace[trace.len().saturating_sub(3)..];
        let exact_end = tail.last().is_some_and(|t| t.1 <= floor);
        if tail.len() < 3 {
            short += 1;
        }
        if tail.len() < 2 || (tail.len() < 3 && !exact_end) || tail.iter().any(|t| t.3 != tail[0].3) {
            bad.push(format!("seed {seed}: support not constant over the last 3 iterations"));
        }
    }
    let mut detail = format!(
        "20 instances, {checks} Newton steps inside the 1e-3 ball ({sharp} above the roundoff floor), \
         {short} runs ended exactly in under 3 iterations, {} violations",
        bad.len()
    );
    if let Some(first) = bad.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    Verdict::new(bad.is_empty() && checks > 0, detail)
}

fn adjoint_gap<M: LinearMap<f64, Complex64>>(map: &M, rng: &mut ChaCha8Rng) -> f64 {
    let mut cvec = |n: usize| -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect()
    };
    let x = cvec(map.ncols());
    let y = cvec(map.nrows());
    let lhs = inner::<f64, Complex64>(&map.apply(&x), &y);
    let rhs = inner::<f64, Complex64>(&x, &map.adjoint_apply(&y));
    (lhs - rhs).norm() / (1.0 + lhs.norm())
}

fn c9_operators() -> Verdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut fails = Vec::new();

    let dense = gaussian(&mut rng, 30, 50, 1.0);
    let dft = PartialDftMap::<f64>::random(1024, 300, 1).expect("valid rows");
    let haar = HaarMap::new(32, HaarDirection::Inverse).expect("power of two");
    let composed = ComposedMap::new::<f64, Complex64>(dft.clone(), haar).expect("matching sizes");
    let adj = [
        adjoint_gap(&dense, &mut rng),
        adjoint_gap(&dft, &mut rng),
        adjoint_gap(&haar, &mut rng),
        adjoint_gap(&composed, &mut rng),
    ];
    if adj.iter().any(|&g| g > 1e-12) {
        fails.push(format!("adjoint {adj:?}"));
    }

    let img: Vec<f64> = (0..64 * 64).map(|_| rng.random::<f64>()).collect();
    let w = haar_forward(&img, 64).expect("square image");
    let round_trip = dist(&haar_inverse(&w, 64).expect("square image"), &img);
    let norm_gap = (norm(&w) - norm(&img)).abs();
    let cols: Vec<Vec<f64>> = materialize::<f64, f64, _>(&HaarMap::new(16, HaarDirection::Forward).expect("16"));
    let mut ortho: f64 = 0.0;
    for i in 0..cols.len() {
        for j in 0..cols.len() {
            let want = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((dot(&cols[i], &cols[j]) - want).abs());
        }
    }
    if round_trip > 1e-12 || norm_gap > 1e-12 || ortho > 1e-12 {
        fails.push(format!("haar {round_trip:.1e}/{norm_gap:.1e}/{ortho:.1e}"));
    }

    let small = PartialDftMap::<f64>::random(64, 16, 2).expect("valid rows");
    let x: Vec<Complex64> = (0..64)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let fast = small.apply(&x);
    let dft_gap = small
        .rows()
        .iter()
        .zip(&fast)
        .map(|(&k, &yk)| {
            let direct: Complex64 = x
                .iter()
                .enumerate()
                .map(|(t, &v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * ((k * t) % 64) as f64 / 64.0))
                .sum::<Complex64>()
                / 8.0;
            (direct - yk).norm()
        })
        .fold(0.0, f64::max);
    if dft_gap > 1e-10 {
        fails.push(format!("partial DFT {dft_gap:.1e}"));
    }

    let mut power_gap: f64 = 0.0;
    for (m, n) in [(50, 100), (40, 80)] {
        let a = gaussian(&mut rng, m, n, 1.0);
        let est: f64 = power_iteration::<f64, f64, _>(&a, 100, 3);
        let na = nalgebra::DMatrix::from_fn(m, n, |i, j| a[(i, j)]);
        let exact = (na.transpose() * &na).symmetric_eigen().eigenvalues.max();
        power_gap = power_gap.max((est - exact).abs() / exact);
    }
    if power_gap > 0.01 {
        fails.push(format!("power iteration {power_gap:.1e}"));
    }

    let secs = started.elapsed().as_secs_f64();
    if secs >= 30.0 {
        fails.push(format!("took {secs:.1} s"));
    }
    let detail = if fails.is_empty() {
        format!(
            "adjoint ≤ {:.0e}, Haar ≤ {:.0e}, DFT {dft_gap:.0e}, power {power_gap:.1e} in {secs:.2} s",
            adj.iter().fold(0.0f64, |m, &v| m.max(v)),
            round_trip.max(norm_gap).max(ortho)
        )
    } else {
        fails.join("; ")
    };
    Verdict::new(fails.is_empty(), detail)
}

fn strip_time(csv: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let time = header.iter().position(|&h| h == "time_s");
    std::iter::once(header.join(","))
        .chain(lines.map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| Some(*i) != time)
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        }))
        .collect()
}

fn c10_determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut outputs = Vec::new();
    for jobs in [1, 2] {
        let mut config = ExperimentConfig::new(Experiment::E1, vec![1000]);
        config.trials = 3;
        config.master_seed = 7;
        config.jobs = Some(jobs);
        let rows = run_experiment(&config).expect("valid configuration");
        let path = dir.path().join(format!("run{jobs}.csv"));
        write_csv(&path, &rows).expect("writable directory");
        outputs.push(std::fs::read_to_string(&path).expect("written file"));
    }
    let (a, b) = (strip_time(&outputs[0]), strip_time(&outputs[1]));
    Verdict::new(
        a == b && a.len() == 10,
        format!("{} rows, identical outside time_s: {}", a.len() - 1, a == b),
    )
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: &str| filters.is_empty() || filters.iter().any(|f| f == id);
    let mut batches = Batches::default();
    type Criterion<'a> = (&'static str, &'static str, Box<dyn FnOnce(&mut Batches) -> Verdict + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("c1", "noise-free recovery", Box::new(c1_noise_free)),
        ("c2", "ordering", Box::new(c2_ordering)),
        ("c3", "noisy recovery", Box::new(c3_noisy)),
        ("c4", "image recovery", Box::new(|_| c4_image())),
        ("c5", "prox oracle", Box::new(|_| c5_prox_oracle())),
        ("c6", "descent and feasibility", Box::new(|_| c6_descent())),
        ("c7", "quadratic-form identity", Box::new(|_| c7_lemma_identity())),
        ("c8", "quadratic tail", Box::new(|_| c8_quadratic_tail())),
        ("c9", "operator suite", Box::new(|_| c9_operators())),
        ("c10", "determinism", Box::new(|_| c10_determinism())),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, run) in criteria {
        if !wanted(id) {
            continue;
        }
        let started = Instant::now();
        let v = run(&mut batches);
        ran += 1;
        failed += usize::from(!v.pass);
        println!(
            "{} {id:<3} {name}: {} [{:.1} s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            started.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
