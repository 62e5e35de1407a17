use std::path::Path;

use boxl0::bench::Algorithm;
use boxl0::solver::{estimate_lipschitz, lambda_bounds};
use boxl0::{BoxBounds, DenseMatrix64, LeastSquaresObjective, Problem, SolverParams};

use crate::args::SolveArgs;
use crate::{CliError, CliResult};

const DEFAULT_LAMBDA_FRACTION: f64 = boxl0::bench::DEFAULT_LAMBDA_FRACTION;
const POWER_ITERS: usize = 200;

/// Reads a numeric CSV; each record is one row. Blank lines are skipped.
fn read_rows(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let bad = |msg: String| CliError::usage(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| bad(format!("line {}: not a finite number", line + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

/// A vector may be stored as one column or one row.
fn read_vector(path: &Path) -> CliResult<Vec<f64>> {
    let rows = read_rows(path)?;
    if rows.len() == 1 || rows.iter().all(|r| r.len() == 1) {
        Ok(rows.concat())
    } else {
        Err(CliError::usage(format!("{}: expected a single row or column", path.display())))
    }
}

fn read_matrix(path: &Path) -> CliResult<DenseMatrix64> {
    let rows = read_rows(path)?;
    if rows.is_empty() {
        return Err(CliError::usage(format!("{}: empty matrix", path.display())));
    }
    DenseMatrix64::from_rows(&rows)
        .ok_or_else(|| CliError::usage(format!("{}: rows have different lengths", path.display())))
}

fn check_len(path: &Path, what: &str, expected: usize, got: usize) -> CliResult {
    if expected == got {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "{}: {what} has {got} entries, expected {expected}",
            path.display()
        )))
    }
}

pub fn run(args: SolveArgs) -> CliResult {
    args.solver.validate()?;
    let a = read_matrix(&args.a)?;
    let b = read_vector(&args.b)?;
    let l = read_vector(&args.l)?;
    let u = read_vector(&args.u)?;
    check_len(&args.b, "b", a.nrows(), b.len())?;
    check_len(&args.l, "l", a.ncols(), l.len())?;
    check_len(&args.u, "u", a.ncols(), u.len())?;
    let bounds = BoxBounds::new(l, u).map_err(|e| CliError::usage(format!("bounds: {e}")))?;
    let objective = LeastSquaresObjective::new(a, b).map_err(CliError::usage)?;

    let l_hat = estimate_lipschitz(&objective, POWER_ITERS, args.seed);
    if !(l_hat > 0.0) {
        return Err(CliError::usage("A is zero"));
    }
    let upper = lambda_bounds(&objective, &bounds, l_hat).map(|lb| lb.upper);
    let lambda = match (args.solver.lambda, args.solver.lambda_fraction) {
        (Some(l), _) => l,
        (None, frac) => {
            let upper = upper.as_ref().map_err(|_| {
                CliError::usage("the gradient vanishes at the origin; pass --lambda explicitly")
            })?;
            frac.unwrap_or(DEFAULT_LAMBDA_FRACTION) * upper
        }
    };
    let lambda0 = upper.map(|u| (u / 2.0).max(lambda)).unwrap_or(lambda);
    let problem = Problem::new(objective, bounds, lambda).map_err(CliError::usage)?;

    let mut params = SolverParams::new(l_hat, lambda0);
    params.tau = args.solver.tau_cap;
    if let Some(t) = args.solver.tol_rel {
        params.tol_rel = t;
    }
    if let Some(t) = args.solver.tol_f {
        params.tol_f = t;
    }
    if let Some(k) = args.solver.max_iter {
        params.max_iter = k;
    }
    params.strict_acceptance = args.solver.strict;
    let step = args.solver.piht_step.map(|s| s.to_step()).unwrap_or_default();

    let algorithm = Algorithm::from(args.algorithm);
    let report = algorithm
        .solve(&problem, &params, step)
        .map_err(|e| CliError::failure(format!("{}: {e}", algorithm.as_str())))?;

    outln!("algorithm   {}", algorithm.as_str());
    outln!("lambda      {:e}", lambda);
    outln!("iterations  {}", report.iterations);
    outln!("stop        {:?}", report.stop);
    outln!("nnz         {}", report.nnz);
    outln!("f           {:e}", report.f_final);
    outln!("residual_F  {:e}", report.residual_norm);
    let shown: Vec<String> = report.x_final.iter().take(10).map(|v| format!("{v:.6}")).collect();
    let more = if report.x_final.len() > 10 { ", …" } else { "" };
    outln!("x           [{}{more}]", shown.join(", "));

    if let Some(out) = &args.out {
        let body: String = report.x_final.iter().map(|v| format!("{v:e}\n")).collect();
        std::fs::write(out, body).map_err(|e| CliError::failure(format!("{}: {e}", out.display())))?;
        outln!("wrote x to {}", out.display());
    }
    Ok(())
}
