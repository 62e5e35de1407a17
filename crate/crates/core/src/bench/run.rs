use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::generate::{gen_e1, gen_e2, gen_e3, gen_e4, Experiment, Instance, E4_FULL_SCALE_M_RATIO};
use super::image::phantom;
use super::{metric_psnr, metric_res};
use crate::baselines::{solve_pga, solve_piht_with, PihtOptions, PihtStep};
use crate::error::{Error, Result};
use crate::model::{SmoothObjective, SolverParams, SolverReport};
use crate::solver::solve_bnl0r;

pub const CSV_HEADER: [&str; 15] = [
    "experiment",
    "algorithm",
    "n",
    "m",
    "s",
    "seed",
    "lambda",
    "tau",
    "iter",
    "time_s",
    "res",
    "psnr",
    "nnz",
    "f_final",
    "residual_F",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Bnl0r,
    Piht,
    Pga,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Bnl0r, Algorithm::Piht, Algorithm::Pga];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Bnl0r => "BNL0R",
            Algorithm::Piht => "PIHT",
            Algorithm::Pga => "PGA",
        }
    }

    pub fn solve<O: SmoothObjective<f64>>(
        &self,
        problem: &crate::model::Problem<f64, O>,
        params: &SolverParams<f64>,
        piht_step: PihtStep<f64>,
    ) -> Result<SolverReport<f64>> {
        match self {
            Algorithm::Bnl0r => solve_bnl0r(problem, params, None),
            Algorithm::Piht => {
                let opts = PihtOptions { step: piht_step, ..Default::default() };
                solve_piht_with(problem, params, None, &opts, None)
            }
            Algorithm::Pga => solve_pga(problem, params, None),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bnl0r" => Ok(Algorithm::Bnl0r),
            "piht" => Ok(Algorithm::Piht),
            "pga" => Ok(Algorithm::Pga),
            other => Err(Error::InvalidParameter(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// A grid of trials: every size × trial index, each solved by every algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Problem dimensions `n`; for the image experiment `n = side²`.
    pub sizes: Vec<usize>,
    /// `m = round(m_ratio·n)`; ignored by E3, which fixes `m = n/4`.
    pub m_ratio: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub snr_db: f64,
    pub nf: f64,
    pub algorithms: Vec<Algorithm>,
    /// Absolute penalty; overrides `lambda_fraction`.
    pub lambda: Option<f64>,
    /// Penalty as a fraction of the instance's upper penalty bound.
    pub lambda_fraction: Option<f64>,
    pub tau_cap: Option<f64>,
    pub tol_rel: Option<f64>,
    pub tol_f: Option<f64>,
    pub max_iter: Option<usize>,
    pub strict_acceptance: bool,
    /// Curvature rule for PIHT.
    pub piht_step: PihtStep<f64>,
    /// Worker threads; `None` uses every processor.
    pub jobs: Option<usize>,
    /// Image for E4 (`side × side`, intensities in `[0,1]`); the phantom
    /// is used when absent.
    pub image: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, sizes: Vec<usize>) -> Self {
        Self {
            experiment,
            sizes,
            m_ratio: if experiment == Experiment::E4 { E4_FULL_SCALE_M_RATIO } else { 0.25 },
            trials: 1,
            master_seed: 0,
            snr_db: 30.0,
            nf: 0.05,
            algorithms: Algorithm::ALL.to_vec(),
            lambda: None,
            lambda_fraction: None,
            tau_cap: None,
            tol_rel: None,
            tol_f: None,
            max_iter: None,
            strict_acceptance: false,
            piht_step: PihtStep::Fixed,
            jobs: None,
            image: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.sizes.is_empty() {
            return bad("at least one size is required");
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required");
        }
        if !(self.m_ratio > 0.0 && self.m_ratio <= 1.0) {
            return bad("m_ratio must lie in (0, 1]");
        }
        if matches!(self.experiment, Experiment::E1 | Experiment::E2) && self.sizes.iter().any(|&n| n < 1000) {
            return bad("e1 and e2 need n >= 1000 so that s = 0.001n is at least one");
        }
        if self.experiment == Experiment::E4 {
            for &n in &self.sizes {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n || !side.is_power_of_two() {
                    return bad("image sizes must be squares of a power of two");
                }
            }
            if let Some(img) = &self.image {
                if self.sizes.iter().any(|&n| n != img.len()) {
                    return bad("image size does not match the requested n");
                }
            }
        }
        if let Some(j) = self.jobs {
            if j == 0 {
                return bad("jobs must be at least 1");
            }
        }
        Ok(())
    }

    /// Solver parameters for one instance with this config's overrides.
    pub fn params_for<O>(&self, inst: &Instance<O>) -> SolverParams<f64> {
        let lambda = inst.problem.lambda_target;
        let mut p = SolverParams::new(inst.meta.lipschitz, (inst.meta.lambda_bar / 2.0).max(lambda));
        p.tau = self.tau_cap;
        p.tol_f = self.tol_f.unwrap_or(inst.meta.tol_f);
        p.tol_rel = self.tol_rel.unwrap_or(inst.meta.experiment.default_tol_rel());
        if let Some(k) = self.max_iter {
            p.max_iter = k;
        }
        p.strict_acceptance = self.strict_acceptance;
        p
    }
}

/// One algorithm on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub experiment: Experiment,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub seed: u64,
    pub trial: usize,
    pub lambda: f64,
    pub tau: f64,
    pub iter: usize,
    pub time_s: f64,
    pub res: f64,
    pub psnr: Option<f64>,
    pub nnz: usize,
    pub f_final: f64,
    pub residual_f: f64,
    /// Set when generation or solving failed; numeric fields are NaN then.
    pub error: Option<String>,
}

impl TrialResult {
    fn failed(
        experiment: Experiment,
        algorithm: Algorithm,
        n: usize,
        seed: u64,
        trial: usize,
        err: &Error,
    ) -> Self {
        Self {
            experiment,
            algorithm,
            n,
            m: 0,
            s: 0,
            seed,
            trial,
            lambda: f64::NAN,
            tau: f64::NAN,
            iter: 0,
            time_s: f64::NAN,
            res: f64::NAN,
            psnr: None,
            nnz: 0,
            f_final: f64::NAN,
            residual_f: f64::NAN,
            error: Some(err.to_string()),
        }
    }

    fn csv_record(&self) -> [String; 15] {
        let e = |v: f64| format!("{v:e}");
        [
            self.experiment.as_str().to_string(),
            self.algorithm.as_str().to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.s.to_string(),
            self.seed.to_string(),
            e(self.lambda),
            e(self.tau),
            self.iter.to_string(),
            format!("{:.6}", self.time_s),
            e(self.res),
            self.psnr.map(e).unwrap_or_default(),
            self.nnz.to_string(),
            e(self.f_final),
            e(self.residual_f),
        ]
    }
}

/// Per-trial seed: a SplitMix64 mix of the master seed and the cell.
pub fn trial_seed(master: u64, experiment: Experiment, n: usize, trial: usize) -> u64 {
    let mut z = master
        ^ (experiment as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (n as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9)
        ^ (trial as u64).wrapping_mul(0x94D0_49BB_1331_11EB);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn solve_instance<O: SmoothObjective<f64>>(
    config: &ExperimentConfig,
    mut inst: Instance<O>,
    trial: usize,
) -> Vec<TrialResult> {
    let meta = inst.meta.clone();
    let target = match (config.lambda, config.lambda_fraction) {
        (Some(l), _) => Some(l),
        (None, Some(frac)) => Some(frac * meta.lambda_bar),
        (None, None) => None,
    };
    let fail_all = |err: &Error| {
        config
            .algorithms
            .iter()
            .map(|&a| TrialResult::failed(meta.experiment, a, meta.n, meta.seed, trial, err))
            .collect::<Vec<_>>()
    };
    if let Some(l) = target {
        if let Err(e) = inst.set_lambda_target(l) {
            return fail_all(&e);
        }
    }
    let params = config.params_for(&inst);
    let with_psnr = meta.experiment == Experiment::E4;
    config
        .algorithms
        .iter()
        .map(|&alg| match alg.solve(&inst.problem, &params, config.piht_step) {
            Ok(r) => TrialResult {
                experiment: meta.experiment,
                algorithm: alg,
                n: meta.n,
                m: meta.m,
                s: meta.s,
                seed: meta.seed,
                trial,
                lambda: inst.problem.lambda_target,
                tau: r.tau_final,
                iter: r.iterations,
                time_s: r.wall_time,
                res: metric_res(&r.x_final, &inst.groundtruth),
                psnr: with_psnr.then(|| metric_psnr(&r.x_final, &inst.groundtruth, meta.n)),
                nnz: r.nnz,
                f_final: r.f_final,
                residual_f: r.residual_norm,
                error: None,
            },
            Err(e) => TrialResult::failed(meta.experiment, alg, meta.n, meta.seed, trial, &e),
        })
        .collect()
}

/// Generates the instance for one `(n, trial)` cell and runs every algorithm.
pub fn run_trial(config: &ExperimentConfig, n: usize, trial: usize) -> Vec<TrialResult> {
    let seed = trial_seed(config.master_seed, config.experiment, n, trial);
    let fail = |err: Error| {
        config
            .algorithms
            .iter()
            .map(|&a| TrialResult::failed(config.experiment, a, n, seed, trial, &err))
            .collect()
    };
    match config.experiment {
        Experiment::E1 => match gen_e1(n, config.m_ratio, seed) {
            Ok(inst) => solve_instance(config, inst, trial),
            Err(e) => fail(e),
        },
        Experiment::E2 => match gen_e2(n, config.m_ratio, config.snr_db, seed) {
            Ok(inst) => solve_instance(config, inst, trial),
            Err(e) => fail(e),
        },
        Experiment::E3 => match gen_e3(n, seed) {
            Ok(inst) => solve_instance(config, inst, trial),
            Err(e) => fail(e),
        },
        Experiment::E4 => {
            let side = (n as f64).sqrt().round() as usize;
            let image = config.image.clone().unwrap_or_else(|| phantom(side));
            let m = ((config.m_ratio * n as f64).round() as usize).max(1);
            match gen_e4(&image, side, m, config.nf, seed) {
                Ok(inst) => solve_instance(config, inst, trial),
                Err(e) => fail(e),
            }
        }
    }
}

/// Runs the whole grid. Rows come back sorted by `(n, trial, algorithm)`
/// regardless of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = config.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let mut rows: Vec<TrialResult> = pool.install(|| {
        cells
            .par_iter()
            .flat_map_iter(|&(n, t)| run_trial(config, n, t))
            .collect()
    });
    rows.sort_by_key(|r| (r.n, r.trial, r.algorithm));
    Ok(rows)
}

/// Writes the rows atomically (temporary file in the target directory, then
/// rename).
pub fn write_csv(path: &Path, rows: &[TrialResult]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in rows {
            w.write_record(r.csv_record()).map_err(io)?;
        }
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Averages over the trials of one `(algorithm, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub algorithm: Algorithm,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    /// Mean iteration count rounded to the nearest integer.
    pub iter: usize,
    pub time_s: f64,
    pub res: f64,
    pub psnr: Option<f64>,
    pub nnz: f64,
}

pub fn summarize(rows: &[TrialResult]) -> Vec<CellSummary> {
    let mut keys: Vec<(usize, Algorithm)> = rows.iter().map(|r| (r.n, r.algorithm)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(n, algorithm)| {
            let cell: Vec<&TrialResult> = rows.iter().filter(|r| r.n == n && r.algorithm == algorithm).collect();
            let ok: Vec<&&TrialResult> = cell.iter().filter(|r| r.error.is_none()).collect();
            let k = ok.len() as f64;
            // NaN when every trial failed; the table prints it as a dash
            let mean = |f: &dyn Fn(&TrialResult) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / k;
            let psnr = ok
                .iter()
                .all(|r| r.psnr.is_some())
                .then(|| mean(&|r| r.psnr.unwrap_or(f64::NAN)))
                .filter(|_| !ok.is_empty());
            CellSummary {
                algorithm,
                n,
                trials: cell.len(),
                failures: cell.len() - ok.len(),
                iter: if ok.is_empty() { 0 } else { mean(&|r| r.iter as f64).round() as usize },
                time_s: mean(&|r| r.time_s),
                res: mean(&|r| r.res),
                psnr,
                nnz: mean(&|r| r.nnz as f64),
            }
        })
        .collect()
}

/// Plain-text table: one line per `(algorithm, n)` cell.
pub fn format_summary(cells: &[CellSummary]) -> String {
    let mut out = Vec::new();
    let _ = writeln!(
        out,
        "{:<7} {:>7} {:>6} {:>10} {:>10} {:>8} {:>9} {:>6}",
        "method", "n", "iter", "time(s)", "res", "psnr", "nnz", "fail"
    );
    for c in cells {
        let psnr = c.psnr.map(|p| format!("{p:.2}")).unwrap_or_else(|| "-".into());
        if c.failures == c.trials {
            let _ = writeln!(
                out,
                "{:<7} {:>7} {:>6} {:>10} {:>10} {:>8} {:>9} {:>6}",
                c.algorithm.as_str(),
                c.n,
                "-",
                "-",
                "-",
                psnr,
                "-",
                c.failures
            );
            continue;
        }
        let _ = writeln!(
            out,
            "{:<7} {:>7} {:>6} {:>10.3e} {:>10.2e} {:>8} {:>9.1} {:>6}",
            c.algorithm.as_str(),
            c.n,
            c.iter,
            c.time_s,
            c.res,
            psnr,
            c.nnz,
            c.failures
        );
    }
    String::from_utf8(out).expect("ascii table")
}
