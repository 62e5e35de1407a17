use num_complex::Complex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::model::{BoxBounds, LeastSquaresObjective, Problem, SmoothObjective};
use crate::operators::{haar_forward_levels, ComposedMap, HaarDirection, HaarMap, LinearMap, PartialDftMap};
use crate::solver::{estimate_lipschitz, lambda_bounds};
use crate::{DenseLeastSquares64, ImageLeastSquares64};

/// Mixed into the instance seed to give the noise its own stream.
const NOISE_SALT: u64 = 0x006e_6f69_7365;
/// Power-iteration steps used for `L̂` on generated instances.
const POWER_ITERS: usize = 100;
/// Default penalty as a fraction of the upper penalty bound at the origin.
pub const DEFAULT_LAMBDA_FRACTION: f64 = 1e-3;
/// Measurement fraction of the full-scale image experiment (14369 of 65536).
pub const E4_FULL_SCALE_M_RATIO: f64 = 14369.0 / 65536.0;
/// Haar depth for the image experiment; keeps coefficients of `[0,1]`
/// intensities inside the `[−10, 10]` box.
pub const E4_HAAR_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    E1,
    E2,
    E3,
    E4,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::E1 => "e1",
            Experiment::E2 => "e2",
            Experiment::E3 => "e3",
            Experiment::E4 => "e4",
        }
    }

    /// Default `ε` of the objective stop.
    pub fn default_tol_f(&self) -> f64 {
        match self {
            Experiment::E1 => 1e-20,
            Experiment::E2 | Experiment::E3 => 1e-6,
            Experiment::E4 => 0.0,
        }
    }

    /// Relative-change tolerance. The noise-free experiment runs until the
    /// objective test fires, so its tolerance sits far below round-off of
    /// the first-order methods' stagnation.
    pub fn default_tol_rel(&self) -> f64 {
        match self {
            Experiment::E1 => 1e-12,
            _ => 1e-6,
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(Experiment::E1),
            "e2" => Ok(Experiment::E2),
            "e3" => Ok(Experiment::E3),
            "e4" => Ok(Experiment::E4),
            other => Err(Error::InvalidParameter(format!("unknown experiment {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMeta {
    pub experiment: Experiment,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub seed: u64,
    pub snr_db: Option<f64>,
    pub nf: Option<f64>,
    pub box_desc: String,
    /// Objective stop level for this instance.
    pub tol_f: f64,
    /// `L̂` of the Hessian, shared by all solvers on this instance.
    pub lipschitz: f64,
    /// Upper penalty bound at the origin.
    pub lambda_bar: f64,
}

#[derive(Debug, Clone)]
pub struct Instance<O> {
    pub problem: Problem<f64, O>,
    pub groundtruth: Vec<f64>,
    pub meta: InstanceMeta,
}

impl<O: SmoothObjective<f64>> Instance<O> {
    /// Replaces the target penalty, e.g. with a user override.
    pub fn set_lambda_target(&mut self, lambda: f64) -> Result<()> {
        if !(lambda > 0.0) {
            return Err(Error::NonpositiveLambda);
        }
        self.problem.lambda_target = lambda;
        Ok(())
    }
}

fn finish<O: SmoothObjective<f64>>(
    objective: O,
    bounds: BoxBounds<f64>,
    groundtruth: Vec<f64>,
    mut meta: InstanceMeta,
) -> Result<Instance<O>> {
    let l_hat = estimate_lipschitz(&objective, POWER_ITERS, meta.seed ^ 0x5eed);
    let lambda_bar = lambda_bounds(&objective, &bounds, l_hat)?.upper;
    meta.lipschitz = l_hat;
    meta.lambda_bar = lambda_bar;
    let problem = Problem::new(objective, bounds, DEFAULT_LAMBDA_FRACTION * lambda_bar)?;
    Ok(Instance {
        problem,
        groundtruth,
        meta,
    })
}

fn gaussian_normalized(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<f64> {
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    let mut a = DenseMatrix::from_col_major(m, n, data).expect("sized buffer");
    a.normalize_columns();
    a
}

fn sparse_uniform(n: usize, s: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; n];
    let mut idx = sample(rng, n, s).into_vec();
    idx.sort_unstable();
    for i in idx {
        x[i] = lo + (hi - lo) * rng.random::<f64>();
    }
    x
}

fn e1_parts(n: usize, m_ratio: f64, seed: u64) -> Result<(DenseMatrix<f64>, Vec<f64>, usize, usize)> {
    let m = (m_ratio * n as f64).round() as usize;
    if m < 1 || !m_ratio.is_finite() || m_ratio <= 0.0 {
        return Err(Error::BadShape(format!("m_ratio {m_ratio} gives no rows for n = {n}")));
    }
    if n < 1000 {
        return Err(Error::BadShape(format!("n = {n} gives fewer than one nonzero (s = 0.001n)")));
    }
    let s = ((0.001 * n as f64).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_normalized(m, n, &mut rng);
    let x = sparse_uniform(n, s, 0.1, 3.0, &mut rng);
    Ok((a, x, m, s))
}

/// Noise-free recovery: unit-norm Gaussian columns, `s = 0.001n` nonzeros
/// uniform on `[0.1, 3]`, box `[−3, 3]ⁿ`, `b = Ax*`.
pub fn gen_e1(n: usize, m_ratio: f64, seed: u64) -> Result<Instance<DenseLeastSquares64>> {
    let (a, x, m, s) = e1_parts(n, m_ratio, seed)?;
    let b = a.mul_vec(&x);
    let meta = InstanceMeta {
        experiment: Experiment::E1,
        n,
        m,
        s,
        seed,
        snr_db: None,
        nf: None,
        box_desc: "[-3,3]^n".into(),
        tol_f: Experiment::E1.default_tol_f(),
        lipschitz: 0.0,
        lambda_bar: 0.0,
    };
    finish(LeastSquaresObjective::new(a, b)?, BoxBounds::symmetric(n, 3.0)?, x, meta)
}

/// The noise-free construction with white Gaussian noise at `snr_db`.
pub fn gen_e2(n: usize, m_ratio: f64, snr_db: f64, seed: u64) -> Result<Instance<DenseLeastSquares64>> {
    let (a, x, m, s) = e1_parts(n, m_ratio, seed)?;
    let b = add_noise_snr(&a.mul_vec(&x), snr_db, seed ^ NOISE_SALT)?;
    let meta = InstanceMeta {
        experiment: Experiment::E2,
        n,
        m,
        s,
        seed,
        snr_db: Some(snr_db),
        nf: None,
        box_desc: "[-3,3]^n".into(),
        tol_f: Experiment::E2.default_tol_f(),
        lipschitz: 0.0,
        lambda_bar: 0.0,
    };
    finish(LeastSquaresObjective::new(a, b)?, BoxBounds::symmetric(n, 3.0)?, x, meta)
}

/// `clean + ξ` with Gaussian `ξ` rescaled so that
/// `10·log₁₀(‖clean‖²/‖ξ‖²) = snr_db` exactly. An infinite SNR returns
/// `clean` unchanged.
pub fn add_noise_snr(clean: &[f64], snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    if snr_db == f64::INFINITY {
        return Ok(clean.to_vec());
    }
    let signal = linalg::norm(clean);
    if signal == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..clean.len()).map(|_| rng.sample(StandardNormal)).collect();
    let target = signal / 10f64.powf(snr_db / 20.0);
    let scale = target / linalg::norm(&raw);
    Ok(clean.iter().zip(&raw).map(|(c, r)| c + scale * r).collect())
}

/// Four equal blocks with 25 nonzeros each; block `q ∈ {1,…,4}` draws values
/// uniform on `[0, q]` and lives in the box `[−(q+1), q+1]`; `m = n/4`;
/// 30 dB noise.
pub fn gen_e3(n: usize, seed: u64) -> Result<Instance<DenseLeastSquares64>> {
    const PER_BLOCK: usize = 25;
    if !n.is_multiple_of(4) || n / 4 < PER_BLOCK {
        return Err(Error::BadShape(format!("n = {n} must be a multiple of 4 with n/4 >= 25")));
    }
    let q_len = n / 4;
    let m = n / 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_normalized(m, n, &mut rng);
    let mut x = vec![0.0; n];
    let mut bound = vec![0.0; n];
    for q in 0..4 {
        let scale = (q + 1) as f64;
        let mut idx = sample(&mut rng, q_len, PER_BLOCK).into_vec();
        idx.sort_unstable();
        for i in idx {
            x[q * q_len + i] = scale * rng.random::<f64>();
        }
        bound[q * q_len..(q + 1) * q_len].fill(scale + 1.0);
    }
    let snr = 30.0;
    let b = add_noise_snr(&a.mul_vec(&x), snr, seed ^ NOISE_SALT)?;
    let meta = InstanceMeta {
        experiment: Experiment::E3,
        n,
        m,
        s: 4 * PER_BLOCK,
        seed,
        snr_db: Some(snr),
        nf: None,
        box_desc: "[-2,2]x[-3,3]x[-4,4]x[-5,5]".into(),
        tol_f: Experiment::E3.default_tol_f(),
        lipschitz: 0.0,
        lambda_bar: 0.0,
    };
    finish(LeastSquaresObjective::new(a, b)?, BoxBounds::new(bound.clone(), bound)?, x, meta)
}

/// Image recovery with `A = F_S W⁻¹`: `F_S` keeps the zero-frequency row and
/// `m − 1` uniformly random other rows of the unitary DFT of the flattened image and `W` is the Haar transform truncated
/// to [`E4_HAAR_LEVELS`] levels. `image` is row-major `side × side` with
/// intensities in `[0, 1]`; complex noise `nf·(N + iN)` is added to every
/// measurement and the objective stop is set to `½‖ξ‖²`.
pub fn gen_e4(image: &[f64], side: usize, m: usize, nf: f64, seed: u64) -> Result<Instance<ImageLeastSquares64>> {
    gen_e4_with_levels(image, side, m, nf, seed, E4_HAAR_LEVELS)
}

pub fn gen_e4_with_levels(
    image: &[f64],
    side: usize,
    m: usize,
    nf: f64,
    seed: u64,
    levels: usize,
) -> Result<Instance<ImageLeastSquares64>> {
    let inverse = HaarMap::with_levels(side, levels, HaarDirection::Inverse)?;
    let x = haar_forward_levels(image, side, levels)?;
    let n = side * side;
    if m == 0 || m > n {
        return Err(Error::BadShape(format!("m = {m} must lie in 1..={n}")));
    }
    let dft = PartialDftMap::random_with_dc(n, m, seed)?;
    let map = ComposedMap::new::<f64, Complex<f64>>(dft, inverse)?;
    let clean = map.apply(&crate::operators::lift::<f64, Complex<f64>>(&x));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ NOISE_SALT);
    let mut noise_sq = 0.0;
    let b: Vec<Complex<f64>> = clean
        .iter()
        .map(|&c| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let xi = Complex::new(nf * re, nf * im);
            noise_sq += xi.norm_sqr();
            c + xi
        })
        .collect();
    let bound = 10.0;
    let s = linalg::nnz(&x);
    let meta = InstanceMeta {
        experiment: Experiment::E4,
        n,
        m,
        s,
        seed,
        snr_db: None,
        nf: Some(nf),
        box_desc: "[-10,10]^n".into(),
        tol_f: 0.5 * noise_sq,
        lipschitz: 0.0,
        lambda_bar: 0.0,
    };
    finish(LeastSquaresObjective::new(map, b)?, BoxBounds::symmetric(n, bound)?, x, meta)
}
