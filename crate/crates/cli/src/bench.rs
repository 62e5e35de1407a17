use std::path::PathBuf;

use boxl0::bench::{
    format_summary, read_pgm, run_experiment, summarize, write_csv, Algorithm, Experiment, ExperimentConfig,
};

use crate::args::{env_seed, BenchArgs, BenchFile, SolverFlags};
use crate::{CliError, CliResult};

/// Fully resolved bench configuration and output path.
pub struct Resolved {
    pub config: ExperimentConfig,
    pub out: PathBuf,
}

/// Applies flags over the config file over defaults.
pub fn resolve(args: &BenchArgs) -> CliResult<Resolved> {
    let file = match &args.config {
        Some(p) => BenchFile::load(p)?,
        None => BenchFile::default(),
    };
    let experiment = match (args.exp, &file.exp) {
        (Some(e), _) => e,
        (None, Some(s)) => s.parse::<Experiment>().map_err(CliError::usage)?,
        (None, None) => return Err(CliError::usage("--exp is required (or `exp` in the config file)")),
    };
    let sizes = if !args.sizes.is_empty() {
        args.sizes.clone()
    } else {
        file.n.clone().unwrap_or_default()
    };
    if sizes.is_empty() {
        return Err(CliError::usage("--n is required (or `n` in the config file)"));
    }
    let algorithms: Vec<Algorithm> = if !args.algorithms.is_empty() {
        args.algorithms.clone()
    } else {
        match &file.algorithms {
            Some(list) => list
                .iter()
                .map(|s| s.parse::<Algorithm>())
                .collect::<Result<_, _>>()
                .map_err(CliError::usage)?,
            None => Algorithm::ALL.to_vec(),
        }
    };
    let solver: SolverFlags = args.solver.merged(&file.solver);
    solver.validate()?;

    let mut config = ExperimentConfig::new(experiment, sizes);
    config.algorithms = algorithms;
    if let Some(r) = args.m_ratio.or(file.m_ratio) {
        config.m_ratio = r;
    }
    if let Some(t) = args.trials.or(file.trials) {
        config.trials = t;
    }
    config.master_seed = match args.seed.or(file.seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    if let Some(s) = args.snr_db.or(file.snr_db) {
        config.snr_db = s;
    }
    if let Some(nf) = args.nf.or(file.nf) {
        if !(nf >= 0.0) {
            return Err(CliError::usage("--nf must be nonnegative"));
        }
        config.nf = nf;
    }
    config.lambda = solver.lambda;
    config.lambda_fraction = solver.lambda_fraction;
    config.tau_cap = solver.tau_cap;
    config.tol_rel = solver.tol_rel;
    config.tol_f = solver.tol_f;
    config.max_iter = solver.max_iter;
    config.strict_acceptance = solver.strict;
    if let Some(step) = solver.piht_step {
        config.piht_step = step.to_step();
    }
    config.jobs = args.jobs.or(file.jobs);
    if let Some(path) = args.image.clone().or(file.image.clone()) {
        if experiment != Experiment::E4 {
            return Err(CliError::usage("--image only applies to e4"));
        }
        let img = read_pgm(&path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        if img.width != img.height {
            return Err(CliError::usage(format!("{}: image must be square", path.display())));
        }
        config.image = Some(img.to_unit());
    }
    config.validate().map_err(CliError::usage)?;
    let out = args
        .out
        .clone()
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.as_str())));
    Ok(Resolved { config, out })
}

pub fn run(args: BenchArgs) -> CliResult {
    let Resolved { config, out } = resolve(&args)?;
    let rows = run_experiment(&config).map_err(CliError::usage)?;
    write_csv(&out, &rows).map_err(|e| CliError::failure(format!("{}: {e}", out.display())))?;
    out!("{}", format_summary(&summarize(&rows)));
    outln!("wrote {} rows to {}", rows.len(), out.display());
    let failed: Vec<String> = rows
        .iter()
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("{} n={} trial={}: {e}", r.algorithm.as_str(), r.n, r.trial))
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::failure(format!("{} trial(s) failed; first: {}", failed.len(), failed[0])))
    }
}
