//! Compressed-sensing experiments: instance generators, noise, metrics,
//! trial orchestration and CSV/PGM output. Everything here is `f64`.

mod generate;
mod image;
mod run;

pub use generate::{
    add_noise_snr, gen_e1, gen_e2, gen_e3, gen_e4, gen_e4_with_levels, Experiment, Instance, InstanceMeta,
    DEFAULT_LAMBDA_FRACTION, E4_HAAR_LEVELS, E4_FULL_SCALE_M_RATIO,
};
pub use image::{phantom, read_pgm, to_gray_bytes, write_pgm, GrayImage};
pub use run::{
    format_summary, run_experiment, run_trial, summarize, trial_seed, write_csv, Algorithm, CellSummary,
    ExperimentConfig, TrialResult, CSV_HEADER,
};

/// `‖x − x*‖`
pub fn metric_res(x: &[f64], xstar: &[f64]) -> f64 {
    crate::linalg::dist(x, xstar)
}

/// `10·log₁₀(n/‖x − x*‖²)`; `+∞` when the vectors coincide.
pub fn metric_psnr(x: &[f64], xstar: &[f64], n: usize) -> f64 {
    let e = crate::linalg::norm_sq(&x.iter().zip(xstar).map(|(a, b)| a - b).collect::<Vec<_>>());
    if e == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (n as f64 / e).log10()
    }
}
