use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use super::LinearMap;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row subset of the unitary DFT of length `n`:
/// `y_j = n^{-1/2} Σ_t x_t exp(−2πi·S_j·t/n)`.
#[derive(Clone)]
pub struct PartialDftMap<T: Scalar> {
    n: usize,
    rows: Vec<usize>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> fmt::Debug for PartialDftMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialDftMap")
            .field("n", &self.n)
            .field("m", &self.rows.len())
            .finish()
    }
}

impl<T: Scalar> PartialDftMap<T> {
    /// `rows` must be distinct and below `n`; they are sorted on construction.
    pub fn new(n: usize, mut rows: Vec<usize>) -> Result<Self> {
        rows.sort_unstable();
        if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::IndexOutOfRange { index: bad, dim: n });
        }
        if rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadShape("DFT rows must be distinct".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            rows,
        })
    }

    /// `m` rows drawn uniformly without replacement.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m > n {
            return Err(Error::BadShape(format!("cannot sample {m} DFT rows out of {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(n, sample(&mut rng, n, m).into_vec())
    }

    /// Row 0 plus `m − 1` rows drawn uniformly from the rest. Without the
    /// zero-frequency row the mean of the signal is not observed at all.
    pub fn random_with_dc(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::BadShape(format!("cannot sample {m} DFT rows out of {n} with row 0 kept")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<usize> = sample(&mut rng, n - 1, m - 1).into_iter().map(|r| r + 1).collect();
        rows.push(0);
        Self::new(n, rows)
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, (0..n).collect())
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    fn scale(&self) -> T {
        T::one() / T::from_usize_lossy(self.n).sqrt()
    }
}

impl<T: Scalar> LinearMap<T, Complex<T>> for PartialDftMap<T> {
    fn nrows(&self) -> usize {
        self.rows.len()
    }

    fn ncols(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = x.to_vec();
        self.forward.process(&mut buf);
        let s = self.scale();
        self.rows.iter().map(|&r| buf[r] * s).collect()
    }

    fn adjoint_apply(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.n];
        for (&r, &v) in self.rows.iter().zip(y) {
            buf[r] = v;
        }
        self.inverse.process(&mut buf);
        let s = self.scale();
        buf.iter_mut().for_each(|v| *v *= s);
        buf
    }
}
