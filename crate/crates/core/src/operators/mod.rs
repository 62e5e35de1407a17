//! Linear maps backing least-squares objectives.
//!
//! A map acts on vectors whose elements are either real (`T`) or complex
//! (`Complex<T>`); the [`Entry`] trait abstracts the handful of operations the
//! objectives need. Decision variables are always real, so objectives lift
//! `x` into the map's element type and take real parts on the way back.

mod dft;
mod haar;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;

pub use dft::PartialDftMap;
pub use haar::{haar_forward, haar_forward_levels, haar_inverse, haar_inverse_levels, HaarDirection, HaarMap};

/// Element type of a map's domain and range.
pub trait Entry<T: Scalar>:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + num_traits::Zero
    + 'static
{
    /// Whether an entry carries an imaginary part.
    const IS_COMPLEX: bool;
    fn from_real(v: T) -> Self;
    fn re(self) -> T;
    fn conj(self) -> Self;
    fn scale(self, s: T) -> Self;
    fn norm_sqr(self) -> T;
    /// `conj(self) * other`
    fn conj_mul(self, other: Self) -> Self;

    /// `Σ wᵢ vᵢ` with real weights.
    fn weighted_sum(weights: &[T], v: &[Self]) -> Self {
        weights.iter().zip(v).fold(Self::zero(), |acc, (&w, &x)| acc + x.scale(w))
    }
}

impl<T: Scalar> Entry<T> for T {
    const IS_COMPLEX: bool = false;
    #[inline]
    fn from_real(v: T) -> Self {
        v
    }
    #[inline]
    fn re(self) -> T {
        self
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        self * s
    }
    #[inline]
    fn norm_sqr(self) -> T {
        self * self
    }
    #[inline]
    fn conj_mul(self, other: Self) -> Self {
        self * other
    }
    fn weighted_sum(weights: &[T], v: &[Self]) -> Self {
        crate::linalg::dot(weights, v)
    }
}

impl<T: Scalar> Entry<T> for Complex<T> {
    const IS_COMPLEX: bool = true;
    #[inline]
    fn from_real(v: T) -> Self {
        Complex::new(v, T::zero())
    }
    #[inline]
    fn re(self) -> T {
        self.re
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
    #[inline]
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    #[inline]
    fn conj_mul(self, other: Self) -> Self {
        Complex::conj(&self) * other
    }
}

/// `Σ conj(a_i) b_i`
pub fn inner<T: Scalar, E: Entry<T>>(a: &[E], b: &[E]) -> E {
    a.iter()
        .zip(b)
        .fold(E::zero(), |acc, (&x, &y)| acc + x.conj_mul(y))
}

/// `Re Σ conj(a_i) b_i`
pub fn re_inner<T: Scalar, E: Entry<T>>(a: &[E], b: &[E]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + x.conj_mul(y).re())
}

pub fn lift<T: Scalar, E: Entry<T>>(x: &[T]) -> Vec<E> {
    x.iter().map(|&v| E::from_real(v)).collect()
}

/// Linear operator `A: Eⁿ → Eᵐ` with its adjoint.
pub trait LinearMap<T: Scalar, E: Entry<T>>: Send + Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[E]) -> Vec<E>;
    fn adjoint_apply(&self, y: &[E]) -> Vec<E>;

    /// `A eᵢ`; callers check the index.
    fn column(&self, i: usize) -> Vec<E> {
        let mut e = vec![E::zero(); self.ncols()];
        e[i] = E::from_real(T::one());
        self.apply(&e)
    }

    /// Whether [`column`](Self::column) costs about `nrows` rather than a
    /// full application.
    fn cheap_columns(&self) -> bool {
        false
    }
}

impl<T: Scalar, E: Entry<T>, M: LinearMap<T, E> + ?Sized> LinearMap<T, E> for &M {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply(&self, x: &[E]) -> Vec<E> {
        (**self).apply(x)
    }
    fn adjoint_apply(&self, y: &[E]) -> Vec<E> {
        (**self).adjoint_apply(y)
    }
    fn column(&self, i: usize) -> Vec<E> {
        (**self).column(i)
    }
    fn cheap_columns(&self) -> bool {
        (**self).cheap_columns()
    }
}

/// Dense real matrix, also usable on complex vectors (real and imaginary
/// parts pass through independently).
impl<T: Scalar, E: Entry<T>> LinearMap<T, E> for DenseMatrix<T> {
    fn nrows(&self) -> usize {
        DenseMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        DenseMatrix::ncols(self)
    }
    fn apply(&self, x: &[E]) -> Vec<E> {
        let mut y = vec![E::zero(); DenseMatrix::nrows(self)];
        for (j, &xj) in x.iter().enumerate() {
            if xj == E::zero() {
                continue;
            }
            for (yi, &aij) in y.iter_mut().zip(self.col(j)) {
                *yi = *yi + xj.scale(aij);
            }
        }
        y
    }
    fn adjoint_apply(&self, y: &[E]) -> Vec<E> {
        (0..DenseMatrix::ncols(self))
            .map(|j| E::weighted_sum(self.col(j), y))
            .collect()
    }
    fn column(&self, i: usize) -> Vec<E> {
        lift(self.col(i))
    }
    fn cheap_columns(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityMap {
    pub n: usize,
}

impl<T: Scalar, E: Entry<T>> LinearMap<T, E> for IdentityMap {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[E]) -> Vec<E> {
        x.to_vec()
    }
    fn adjoint_apply(&self, y: &[E]) -> Vec<E> {
        y.to_vec()
    }
}

/// `outer ∘ inner`
#[derive(Debug, Clone)]
pub struct ComposedMap<O, I> {
    pub outer: O,
    pub inner: I,
}

impl<O, I> ComposedMap<O, I> {
    pub fn new<T, E>(outer: O, inner: I) -> Result<Self>
    where
        T: Scalar,
        E: Entry<T>,
        O: LinearMap<T, E>,
        I: LinearMap<T, E>,
    {
        if outer.ncols() != inner.nrows() {
            return Err(Error::DimensionMismatch {
                what: "composed map inner rows",
                expected: outer.ncols(),
                got: inner.nrows(),
            });
        }
        Ok(Self { outer, inner })
    }
}

impl<T, E, O, I> LinearMap<T, E> for ComposedMap<O, I>
where
    T: Scalar,
    E: Entry<T>,
    O: LinearMap<T, E>,
    I: LinearMap<T, E>,
{
    fn nrows(&self) -> usize {
        self.outer.nrows()
    }
    fn ncols(&self) -> usize {
        self.inner.ncols()
    }
    fn apply(&self, x: &[E]) -> Vec<E> {
        self.outer.apply(&self.inner.apply(x))
    }
    fn adjoint_apply(&self, y: &[E]) -> Vec<E> {
        self.inner.adjoint_apply(&self.outer.adjoint_apply(y))
    }
    fn column(&self, i: usize) -> Vec<E> {
        self.outer.apply(&self.inner.column(i))
    }
}

/// i-th column of `map`, i.e. `map.apply(eᵢ)`.
pub fn op_column<T: Scalar, E: Entry<T>, M: LinearMap<T, E> + ?Sized>(map: &M, i: usize) -> Result<Vec<E>> {
    if i >= map.ncols() {
        return Err(Error::IndexOutOfRange {
            index: i,
            dim: map.ncols(),
        });
    }
    Ok(map.column(i))
}

/// Dense materialization, column by column. Test and small-size use only.
pub fn materialize<T: Scalar, E: Entry<T>, M: LinearMap<T, E> + ?Sized>(map: &M) -> Vec<Vec<E>> {
    (0..map.ncols()).map(|i| map.column(i)).collect()
}

/// `Re(Aᴴ A v)` for real `v`: the Hessian of `½‖Ax − b‖²` in the real variable.
pub fn normal_apply<T: Scalar, E: Entry<T>, M: LinearMap<T, E> + ?Sized>(map: &M, v: &[T]) -> Vec<T> {
    let av = map.apply(&lift::<T, E>(v));
    map.adjoint_apply(&av).into_iter().map(Entry::re).collect()
}

pub(crate) fn gaussian_vector<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            T::lit(v)
        })
        .collect()
}

/// Rayleigh-quotient estimate of `λ_max(Re AᴴA)` by power iteration from a
/// seeded Gaussian start.
pub fn power_iteration<T: Scalar, E: Entry<T>, M: LinearMap<T, E> + ?Sized>(map: &M, iters: usize, seed: u64) -> T {
    power_iteration_with(|v| normal_apply::<T, E, M>(map, v), map.ncols(), iters, seed)
}

/// Power iteration for any symmetric positive semidefinite operator given by
/// its matrix-vector product.
pub fn power_iteration_with<T: Scalar>(
    mut apply: impl FnMut(&[T]) -> Vec<T>,
    n: usize,
    iters: usize,
    seed: u64,
) -> T {
    if n == 0 {
        return T::zero();
    }
    let mut v = gaussian_vector::<T>(n, seed);
    let nv = linalg::norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut estimate = T::zero();
    for _ in 0..iters.max(1) {
        let w = apply(&v);
        let rq = linalg::dot(&v, &w);
        estimate = estimate.max(rq);
        let nw = linalg::norm(&w);
        if !(nw > T::zero()) {
            break;
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    estimate
}
