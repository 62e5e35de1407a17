//! Problem definition shared by every solver: box bounds, the smooth-objective
//! contract, least-squares objectives, solver parameters and run reports.

use std::marker::PhantomData;
use std::sync::Mutex;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::operators::{lift, re_inner, Entry, LinearMap};
use crate::scalar::Scalar;
use crate::solver::DirectionBundle;
use crate::stationarity::IndexPartition;

/// Feasible set `Ω = {x : −l ≤ x ≤ u}` with strictly positive `l`, `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> BoxBounds<T> {
    /// `lower` holds the magnitudes `l_i`, so the box is `[−l_i, u_i]`.
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        check_len("upper bound length", lower.len(), upper.len())?;
        if let Some(index) = lower
            .iter()
            .zip(&upper)
            .position(|(&l, &u)| !(l > T::zero()) || !(u > T::zero()))
        {
            return Err(Error::NonpositiveBound { index });
        }
        Ok(Self { lower, upper })
    }

    pub fn symmetric(n: usize, bound: T) -> Result<Self> {
        Self::new(vec![bound; n], vec![bound; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// `−l_i`
    #[inline]
    pub fn lo(&self, i: usize) -> T {
        -self.lower[i]
    }

    /// `u_i`
    #[inline]
    pub fn hi(&self, i: usize) -> T {
        self.upper[i]
    }

    /// `a = min_i min(l_i², u_i²)`
    pub fn a(&self) -> T {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (l * l).min(u * u))
            .fold(T::infinity(), T::min)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, &v)| v >= self.lo(i) && v <= self.hi(i))
    }

    #[inline]
    pub fn clamp(&self, i: usize, v: T) -> T {
        v.max(self.lo(i)).min(self.hi(i))
    }
}

/// Twice continuously differentiable objective bounded below on `Ω`.
///
/// Hessians are only ever needed on small index blocks, so the contract asks
/// for sub-blocks by index lists instead of the full matrix.
pub trait SmoothObjective<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;

    fn value_and_gradient(&self, x: &[T]) -> (T, Vec<T>) {
        (self.value(x), self.gradient(x))
    }

    /// `∇²f(x)` restricted to `rows × cols`.
    fn hessian_block(&self, x: &[T], rows: &[usize], cols: &[usize]) -> Result<DenseMatrix<T>>;

    /// `∇²_{rows,cols} f(x) · v`.
    fn hessian_block_apply(&self, x: &[T], rows: &[usize], cols: &[usize], v: &[T]) -> Result<Vec<T>> {
        check_len("block vector", cols.len(), v.len())?;
        let block = self.hessian_block(x, rows, cols)?;
        Ok(block.mul_vec(v))
    }

    /// `∇²f(x) · v` over the full space.
    fn hessian_vector(&self, x: &[T], v: &[T]) -> Vec<T> {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.hessian_block_apply(x, &all, &all, v)
            .expect("full index set is in range")
    }

    /// Upper bound on the rank of the Hessian, when one is known. Principal
    /// blocks larger than this are singular and are not factored.
    fn hessian_rank_bound(&self) -> Option<usize> {
        None
    }

    /// Whether [`hessian_block`](Self::hessian_block) is cheap enough to
    /// assemble principal blocks explicitly. When false, solvers work with
    /// [`hessian_block_apply`](Self::hessian_block_apply) only.
    fn cheap_hessian_blocks(&self) -> bool {
        true
    }
}

impl<T: Scalar, O: SmoothObjective<T> + ?Sized> SmoothObjective<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[T]) -> T {
        (**self).value(x)
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        (**self).gradient(x)
    }
    fn value_and_gradient(&self, x: &[T]) -> (T, Vec<T>) {
        (**self).value_and_gradient(x)
    }
    fn hessian_block(&self, x: &[T], rows: &[usize], cols: &[usize]) -> Result<DenseMatrix<T>> {
        (**self).hessian_block(x, rows, cols)
    }
    fn hessian_block_apply(&self, x: &[T], rows: &[usize], cols: &[usize], v: &[T]) -> Result<Vec<T>> {
        (**self).hessian_block_apply(x, rows, cols, v)
    }
    fn hessian_vector(&self, x: &[T], v: &[T]) -> Vec<T> {
        (**self).hessian_vector(x, v)
    }
    fn hessian_rank_bound(&self) -> Option<usize> {
        (**self).hessian_rank_bound()
    }
    fn cheap_hessian_blocks(&self) -> bool {
        (**self).cheap_hessian_blocks()
    }
}

/// `f(x) = ½‖Ax − b‖²` for a real decision variable `x`.
///
/// With complex measurements the gradient is `Re(Aᴴ(Ax − b))` and Hessian
/// blocks are `Re((AᴴA)_{R,C})`.
#[derive(Debug)]
pub struct LeastSquaresObjective<T: Scalar, E: Entry<T>, M: LinearMap<T, E>> {
    map: M,
    observation: Vec<E>,
    /// Last `(x, Ax − b)` pair. Solvers usually ask for the value at a trial
    /// point and then the gradient at the same point, which saves one
    /// application of the map.
    last: Mutex<Option<(Vec<T>, Vec<E>)>>,
    _scalar: PhantomData<T>,
}

impl<T: Scalar, E: Entry<T>, M: LinearMap<T, E> + Clone> Clone for LeastSquaresObjective<T, E, M> {
    fn clone(&self) -> Self {
        Self {
            map: self.map.clone(),
            observation: self.observation.clone(),
            last: Mutex::new(None),
            _scalar: PhantomData,
        }
    }
}

impl<T: Scalar, E: Entry<T>, M: LinearMap<T, E>> LeastSquaresObjective<T, E, M> {
    pub fn new(map: M, observation: Vec<E>) -> Result<Self> {
        check_len("observation length", map.nrows(), observation.len())?;
        Ok(Self {
            map,
            observation,
            last: Mutex::new(None),
            _scalar: PhantomData,
        })
    }

    pub fn map(&self) -> &M {
        &self.map
    }

    pub fn observation(&self) -> &[E] {
        &self.observation
    }

    /// `Ax − b`
    pub fn residual(&self, x: &[T]) -> Vec<E> {
        let mut r = self.map.apply(&lift::<T, E>(x));
        for (ri, &bi) in r.iter_mut().zip(&self.observation) {
            *ri = *ri - bi;
        }
        r
    }

    fn cached_residual(&self, x: &[T]) -> Vec<E> {
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((cx, r)) = last.as_ref() {
            if cx.as_slice() == x {
                return r.clone();
            }
        }
        let r = self.residual(x);
        *last = Some((x.to_vec(), r.clone()));
        r
    }

    fn half_sq(r: &[E]) -> T {
        r.iter().fold(T::zero(), |acc, &v| acc + v.norm_sqr()) * T::lit(0.5)
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        let n = self.map.ncols();
        match idx.iter().find(|&&i| i >= n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, dim: n }),
            None => Ok(()),
        }
    }
}

impl<T: Scalar, E: Entry<T>, M: LinearMap<T, E>> SmoothObjective<T> for LeastSquaresObjective<T, E, M> {
    fn dim(&self) -> usize {
        self.map.ncols()
    }

    fn value(&self, x: &[T]) -> T {
        Self::half_sq(&self.cached_residual(x))
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        self.value_and_gradient(x).1
    }

    fn value_and_gradient(&self, x: &[T]) -> (T, Vec<T>) {
        let r = self.cached_residual(x);
        let g = self.map.adjoint_apply(&r).into_iter().map(Entry::re).collect();
        (Self::half_sq(&r), g)
    }

    fn hessian_block(&self, _x: &[T], rows: &[usize], cols: &[usize]) -> Result<DenseMatrix<T>> {
        self.check_indices(rows)?;
        self.check_indices(cols)?;
        let row_cols: Vec<Vec<E>> = rows.iter().map(|&i| self.map.column(i)).collect();
        let col_cols: Vec<Vec<E>> = cols
            .iter()
            .map(|&j| match rows.iter().position(|&i| i == j) {
                Some(p) => row_cols[p].clone(),
                None => self.map.column(j),
            })
            .collect();
        Ok(DenseMatrix::from_fn(rows.len(), cols.len(), |p, q| {
            re_inner::<T, E>(&row_cols[p], &col_cols[q])
        }))
    }

    fn hessian_block_apply(&self, _x: &[T], rows: &[usize], cols: &[usize], v: &[T]) -> Result<Vec<T>> {
        self.check_indices(rows)?;
        self.check_indices(cols)?;
        check_len("block vector", cols.len(), v.len())?;
        let mut full = vec![T::zero(); self.dim()];
        for (&j, &vj) in cols.iter().zip(v) {
            full[j] += vj;
        }
        let av = self.map.apply(&lift::<T, E>(&full));
        if rows.len() > 32 || !self.map.cheap_columns() {
            let full_out = self.map.adjoint_apply(&av);
            return Ok(rows.iter().map(|&i| full_out[i].re()).collect());
        }
        Ok(rows
            .iter()
            .map(|&i| re_inner::<T, E>(&self.map.column(i), &av))
            .collect())
    }

    fn hessian_vector(&self, _x: &[T], v: &[T]) -> Vec<T> {
        crate::operators::normal_apply::<T, E, M>(&self.map, v)
    }

    /// `rank Re(AᴴA) ≤ m` for real rows and `≤ 2m` for complex rows.
    fn hessian_rank_bound(&self) -> Option<usize> {
        let per_row = if E::IS_COMPLEX { 2 } else { 1 };
        Some(self.map.nrows() * per_row)
    }

    fn cheap_hessian_blocks(&self) -> bool {
        self.map.cheap_columns()
    }
}

/// `min f(x) + λ‖x‖₀  s.t.  −l ≤ x ≤ u`.
#[derive(Debug, Clone)]
pub struct Problem<T: Scalar, O> {
    pub objective: O,
    pub bounds: BoxBounds<T>,
    pub lambda_target: T,
}

impl<T: Scalar, O: SmoothObjective<T>> Problem<T, O> {
    pub fn new(objective: O, bounds: BoxBounds<T>, lambda_target: T) -> Result<Self> {
        let p = Self {
            objective,
            bounds,
            lambda_target,
        };
        validate_problem(&p)?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    /// `φ(x) = f(x) + λ‖x‖₀`
    pub fn merit(&self, x: &[T], lambda: T) -> T {
        self.objective.value(x) + lambda * T::from_usize_lossy(linalg::nnz(x))
    }
}

/// Checks dimensions, strict positivity of the bounds and of `λ`.
pub fn validate_problem<T: Scalar, O: SmoothObjective<T>>(problem: &Problem<T, O>) -> Result<()> {
    check_len("bounds length", problem.objective.dim(), problem.bounds.dim())?;
    check_len("upper bound length", problem.bounds.lower.len(), problem.bounds.upper.len())?;
    if let Some(index) = problem
        .bounds
        .lower
        .iter()
        .zip(&problem.bounds.upper)
        .position(|(&l, &u)| !(l > T::zero()) || !(u > T::zero()))
    {
        return Err(Error::NonpositiveBound { index });
    }
    if !(problem.lambda_target > T::zero()) {
        return Err(Error::NonpositiveLambda);
    }
    Ok(())
}

/// Tunables of the subspace Newton solver and the baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams<T> {
    /// Optional fixed cap on τ. The step is always kept below `a/(2λ)`.
    pub tau: Option<T>,
    /// Homotopy start; equal to the problem's λ for a fixed-λ solve.
    pub lambda0: T,
    /// Geometric homotopy factor in (0, 1).
    pub lambda_decay: T,
    pub delta: T,
    pub sigma: T,
    pub beta: T,
    /// Derived from `(L̂, δ, σ)`; see [`SolverParams::recompute_alpha_bar`].
    pub alpha_bar: T,
    pub lipschitz_estimate: T,
    pub max_iter: usize,
    pub tol_rel: T,
    pub tol_f: T,
    pub max_backtracks: usize,
    /// `true` selects the four strict acceptance conditions, `false` the
    /// relaxed variant.
    pub strict_acceptance: bool,
    /// Reduced systems larger than this are treated as unsolvable.
    pub max_newton_dim: usize,
}

impl<T: Scalar> SolverParams<T> {
    /// Defaults for a given curvature estimate and homotopy start.
    pub fn new(lipschitz_estimate: T, lambda0: T) -> Self {
        let mut p = Self {
            tau: None,
            lambda0,
            lambda_decay: T::lit(0.5),
            delta: T::lit(1e-6),
            sigma: T::lit(1e-4),
            beta: T::lit(0.5),
            alpha_bar: T::one(),
            lipschitz_estimate,
            max_iter: 2000,
            tol_rel: T::lit(1e-6),
            tol_f: T::zero(),
            max_backtracks: 40,
            strict_acceptance: false,
            max_newton_dim: 4000,
        };
        p.recompute_alpha_bar();
        p
    }

    pub fn with_lipschitz(mut self, l_hat: T) -> Self {
        self.lipschitz_estimate = l_hat;
        self.recompute_alpha_bar();
        self
    }

    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self.recompute_alpha_bar();
        self
    }

    /// `ᾱ = min{(1−2σ)/(L̂/δ−σ), 2(1−σ)δ/L̂, 1}`
    pub fn recompute_alpha_bar(&mut self) {
        self.alpha_bar = alpha_bar(self.lipschitz_estimate, self.delta, self.sigma);
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        let zero = T::zero();
        let one = T::one();
        if !(self.lambda0 > zero) {
            return bad("lambda0 must be positive");
        }
        if !(self.lambda_decay > zero && self.lambda_decay < one) {
            return bad("lambda_decay must lie in (0,1)");
        }
        if !(self.delta > zero) {
            return bad("delta must be positive");
        }
        if !(self.sigma > zero && self.sigma < T::lit(0.5)) {
            return bad("sigma must lie in (0,1/2)");
        }
        if !(self.beta > zero && self.beta < one) {
            return bad("beta must lie in (0,1)");
        }
        if !(self.lipschitz_estimate > zero) {
            return bad("lipschitz estimate must be positive");
        }
        if !(self.tol_rel > zero) || self.tol_f < zero {
            return bad("tolerances must be positive");
        }
        if let Some(t) = self.tau {
            if !(t > zero) {
                return bad("tau cap must be positive");
            }
        }
        Ok(())
    }
}

pub fn alpha_bar<T: Scalar>(l_hat: T, delta: T, sigma: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let denom = l_hat / delta - sigma;
    let first = if denom > T::zero() {
        (one - two * sigma) / denom
    } else {
        T::infinity()
    };
    first.min(two * (one - sigma) * delta / l_hat).min(one)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Newton,
    Pgm,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Newton => "newton",
            StepKind::Pgm => "pgm",
        }
    }
}

/// Solver state at the start of an iteration.
#[derive(Debug, Clone)]
pub struct IterateState<T> {
    pub x: Vec<T>,
    pub grad: Vec<T>,
    pub partition: IndexPartition,
    /// `I_{k−1}`
    pub prev_support: Vec<usize>,
    pub k: usize,
    pub f_val: T,
    pub phi_val: T,
    pub last_step: Option<StepKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    RelativeChange,
    ObjectiveTolerance,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry<T> {
    pub k: usize,
    pub lambda: T,
    pub f: T,
    pub phi: T,
    pub step_norm: T,
    pub kind: StepKind,
    pub nnz: usize,
}

#[derive(Debug, Clone)]
pub struct SolverReport<T> {
    pub x_final: Vec<T>,
    pub iterations: usize,
    pub wall_time: f64,
    pub f_final: T,
    pub nnz: usize,
    /// `‖F_τ(x_final)‖` at the final λ and τ.
    pub residual_norm: T,
    pub newton_steps: usize,
    pub pgm_steps: usize,
    pub lambda_final: T,
    pub tau_final: T,
    pub stop: StopReason,
    pub history: Vec<HistoryEntry<T>>,
}

/// What an observer sees after each accepted step.
#[derive(Debug)]
pub struct IterationRecord<'a, T> {
    pub k: usize,
    pub lambda: T,
    pub tau: T,
    pub x_prev: &'a [T],
    pub x_next: &'a [T],
    pub grad_prev: &'a [T],
    pub f_prev: T,
    pub f_next: T,
    pub kind: StepKind,
    /// Partition at `x_prev`; `None` for the ℓ1 baseline.
    pub partition: Option<&'a IndexPartition>,
    /// `I_{k−1}`
    pub prev_support: &'a [usize],
    /// Search direction for the subspace Newton solver.
    pub bundle: Option<&'a DirectionBundle<T>>,
}
