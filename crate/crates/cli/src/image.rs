use std::path::PathBuf;

use boxl0::bench::{
    gen_e4, metric_psnr, metric_res, phantom, read_pgm, write_csv, write_pgm, Algorithm, Experiment,
    ExperimentConfig, GrayImage, TrialResult, E4_HAAR_LEVELS, E4_FULL_SCALE_M_RATIO,
};
use boxl0::operators::haar_inverse_levels;

use crate::args::{env_seed, ImageArgs};
use crate::{CliError, CliResult};

fn load(args: &ImageArgs) -> CliResult<(Vec<f64>, usize, String)> {
    let (pixels, side, stem) = match &args.input {
        Some(path) => {
            let img = read_pgm(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            if img.width != img.height {
                return Err(CliError::usage(format!(
                    "{}: image is {}×{}, expected a square",
                    path.display(),
                    img.width,
                    img.height
                )));
            }
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "image".into());
            (img.to_unit(), img.width, stem)
        }
        None => (phantom(args.side), args.side, "phantom".to_string()),
    };
    if side < 2 || !side.is_power_of_two() {
        return Err(CliError::usage(format!("image side {side} is not a power of two")));
    }
    Ok((pixels, side, stem))
}

pub fn run(args: ImageArgs) -> CliResult {
    args.solver.validate()?;
    let (pixels, side, stem) = load(&args)?;
    let n = side * side;
    let m = args.m.unwrap_or_else(|| (E4_FULL_SCALE_M_RATIO * n as f64).round() as usize);
    if m == 0 || m > n {
        return Err(CliError::usage(format!("--m must lie in 1..={n}")));
    }
    if args.nf.iter().any(|&nf| !(nf >= 0.0)) {
        return Err(CliError::usage("--nf values must be nonnegative"));
    }
    let algorithms = if args.algorithms.is_empty() {
        Algorithm::ALL.to_vec()
    } else {
        args.algorithms.clone()
    };
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::failure(format!("{}: {e}", args.out_dir.display())))?;

    let mut config = ExperimentConfig::new(Experiment::E4, vec![n]);
    config.tau_cap = args.solver.tau_cap;
    config.tol_rel = args.solver.tol_rel;
    config.tol_f = args.solver.tol_f;
    config.max_iter = args.solver.max_iter;
    config.strict_acceptance = args.solver.strict;
    let step = args.solver.piht_step.map(|s| s.to_step()).unwrap_or_default();

    let mut rows = Vec::new();
    let mut failures = 0;
    outln!("{:<7} {:>6} {:>8} {:>10} {:>7}", "method", "nf", "psnr", "time(s)", "nnz");
    for &nf in &args.nf {
        let mut inst = gen_e4(&pixels, side, m, nf, seed).map_err(CliError::usage)?;
        let target = args
            .solver
            .lambda
            .or(args.solver.lambda_fraction.map(|f| f * inst.meta.lambda_bar));
        if let Some(l) = target {
            inst.set_lambda_target(l).map_err(CliError::usage)?;
        }
        let params = config.params_for(&inst);
        for &alg in &algorithms {
            let report = match alg.solve(&inst.problem, &params, step) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{} nf={nf}: {e}", alg.as_str());
                    failures += 1;
                    continue;
                }
            };
            let recovered = haar_inverse_levels(&report.x_final, side, E4_HAAR_LEVELS).map_err(CliError::failure)?;
            let out = PathBuf::from(&args.out_dir).join(format!("{stem}_{}_nf{nf}.pgm", alg.as_str().to_lowercase()));
            let img = GrayImage::from_unit(side, side, &recovered).map_err(CliError::failure)?;
            write_pgm(&out, &img).map_err(|e| CliError::failure(format!("{}: {e}", out.display())))?;
            let psnr = metric_psnr(&report.x_final, &inst.groundtruth, n);
            outln!(
                "{:<7} {:>6} {:>8.2} {:>10.3} {:>7}",
                alg.as_str(),
                nf,
                psnr,
                report.wall_time,
                report.nnz
            );
            rows.push(TrialResult {
                experiment: Experiment::E4,
                algorithm: alg,
                n,
                m,
                s: inst.meta.s,
                seed,
                trial: 0,
                lambda: inst.problem.lambda_target,
                tau: report.tau_final,
                iter: report.iterations,
                time_s: report.wall_time,
                res: metric_res(&report.x_final, &inst.groundtruth),
                psnr: Some(psnr),
                nnz: report.nnz,
                f_final: report.f_final,
                residual_f: report.residual_norm,
                error: None,
            });
        }
    }
    let csv = args.out_dir.join(format!("{stem}_image.csv"));
    write_csv(&csv, &rows).map_err(|e| CliError::failure(format!("{}: {e}", csv.display())))?;
    outln!("wrote {} images and {}", rows.len(), csv.display());
    if failures > 0 {
        return Err(CliError::failure(format!("{failures} run(s) failed")));
    }
    Ok(())
}
