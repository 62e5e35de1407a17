//! Subspace Newton solver (BNL0R).
//!
//! Each iteration partitions the indices at the prox-gradient trial point,
//! tries a Newton step on the inactive block `Θ` with the active block `Γ`
//! pinned to its bounds and the remaining indices zeroed, and falls back to a
//! proximal-gradient (PGM) step whenever the Newton system is singular, the
//! acceptance test fails, or the line search gives up. The penalty follows a
//! geometric homotopy down to the problem's `λ`.

use std::time::Instant;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, dot, norm, norm_sq, SymmetricFactor};
use crate::model::{
    BoxBounds, HistoryEntry, IterationRecord, Problem, SmoothObjective, SolverParams, SolverReport, StepKind,
    StopReason,
};
use crate::operators::power_iteration_with;
use crate::prox::prox_l0_box;
use crate::scalar::Scalar;
use crate::stationarity::{partition_indices, residual_f, IndexPartition};

/// Largest eigenvalue of `∇²f(0)` by power iteration (exact Hessian for
/// least squares, where it is constant).
pub fn estimate_lipschitz<T: Scalar, O: SmoothObjective<T> + ?Sized>(objective: &O, iters: usize, seed: u64) -> T {
    let origin = vec![T::zero(); objective.dim()];
    power_iteration_with(|v| objective.hessian_vector(&origin, v), objective.dim(), iters, seed)
}

/// `τ = min(0.99·a/(2λ), 1/(4L̂))`
pub fn select_tau<T: Scalar>(bounds: &BoxBounds<T>, lambda: T, l_hat: T) -> T {
    let by_bound = T::lit(0.99) * bounds.a() / (T::lit(2.0) * lambda);
    let by_curvature = T::one() / (T::lit(4.0) * l_hat);
    by_bound.min(by_curvature)
}

fn tau_for<T: Scalar>(bounds: &BoxBounds<T>, lambda: T, params: &SolverParams<T>) -> T {
    let tau = select_tau(bounds, lambda, params.lipschitz_estimate);
    match params.tau {
        Some(cap) => tau.min(cap),
        None => tau,
    }
}

/// `λ_k = max(λ_target, λ₀·decayᵏ)`
pub fn lambda_schedule<T: Scalar>(lambda_target: T, lambda0: T, decay: T, k: usize) -> T {
    let k = i32::try_from(k).unwrap_or(i32::MAX);
    (lambda0 * decay.powi(k)).max(lambda_target)
}

/// Step size and penalty bounds at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBounds<T> {
    /// `τ₀ = min(1/(4L̂), a/(2·max|∇_i f(0)|))`
    pub tau0: T,
    /// `min (τ₀/2)|∇_i f(0)|²` over nonzero gradient entries.
    pub lower: T,
    /// `max (τ₀/2)|∇_i f(0)|²`
    pub upper: T,
}

pub fn lambda_bounds<T: Scalar, O: SmoothObjective<T> + ?Sized>(
    objective: &O,
    bounds: &BoxBounds<T>,
    l_hat: T,
) -> Result<LambdaBounds<T>> {
    check_len("bounds length", objective.dim(), bounds.dim())?;
    let g0 = objective.gradient(&vec![T::zero(); objective.dim()]);
    let gmax = g0.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if gmax.is_zero() {
        return Err(Error::ZeroSignal);
    }
    let tau0 = (T::one() / (T::lit(4.0) * l_hat)).min(bounds.a() / (T::lit(2.0) * gmax));
    let half = tau0 / T::lit(2.0);
    let upper = half * gmax * gmax;
    let lower = g0
        .iter()
        .filter(|v| !v.is_zero())
        .fold(T::infinity(), |m, &v| m.min(half * v * v));
    Ok(LambdaBounds { tau0, lower, upper })
}

/// Default parameters for a problem: `L̂` by power iteration and the homotopy
/// started at half the upper penalty bound (never below the target).
pub fn default_params<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    power_iters: usize,
    seed: u64,
) -> Result<SolverParams<T>> {
    let l_hat = estimate_lipschitz(&problem.objective, power_iters, seed);
    if !(l_hat > T::zero()) {
        return Err(Error::InvalidParameter("objective has no curvature".into()));
    }
    let lambda0 = match lambda_bounds(&problem.objective, &problem.bounds, l_hat) {
        Ok(lb) => (lb.upper / T::lit(2.0)).max(problem.lambda_target),
        Err(_) => problem.lambda_target,
    };
    Ok(SolverParams::new(l_hat, lambda0))
}

/// `d_i = u_i − x_i` on `Γᵘ` and `d_i = −l_i − x_i` on `Γˡ`, ordered like
/// [`IndexPartition::gamma`].
pub fn gamma_direction<T: Scalar>(x: &[T], partition: &IndexPartition, bounds: &BoxBounds<T>) -> Vec<T> {
    partition
        .gamma()
        .into_iter()
        .map(|i| {
            if partition.gamma_u.binary_search(&i).is_ok() {
                bounds.hi(i) - x[i]
            } else {
                bounds.lo(i) - x[i]
            }
        })
        .collect()
}

/// A search direction together with the blocks it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionBundle<T> {
    pub d: Vec<T>,
    pub theta: Vec<usize>,
    /// `Γᵘ ∪ Γˡ`, sorted.
    pub gamma: Vec<usize>,
    pub ibar: Vec<usize>,
    pub kind: StepKind,
    pub solvable: bool,
}

impl<T: Scalar> DirectionBundle<T> {
    pub fn d_theta(&self) -> Vec<T> {
        linalg::gather(&self.d, &self.theta)
    }
    pub fn d_gamma(&self) -> Vec<T> {
        linalg::gather(&self.d, &self.gamma)
    }
    pub fn d_ibar(&self) -> Vec<T> {
        linalg::gather(&self.d, &self.ibar)
    }
    /// `I = Θ ∪ Γ`, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.theta.iter().chain(&self.gamma).copied().collect();
        s.sort_unstable();
        s
    }
}

/// The reduced Newton system could not be factorized (or exceeded the size
/// limit).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unsolvable {
    pub theta_len: usize,
}

/// Newton direction on `Θ` with `d_Γ` pinning to the bounds and `d_Ī = −x_Ī`.
pub fn newton_direction<T: Scalar, O: SmoothObjective<T> + ?Sized>(
    objective: &O,
    x: &[T],
    g: &[T],
    partition: &IndexPartition,
    bounds: &BoxBounds<T>,
) -> std::result::Result<DirectionBundle<T>, Unsolvable> {
    newton_direction_limited(objective, x, g, partition, bounds, usize::MAX)
}

/// Largest `|Θ|` assembled and factored densely; larger systems, and all
/// systems whose blocks are expensive to assemble, go to conjugate gradients.
const DENSE_NEWTON_MAX: usize = 1500;
const CG_REL_TOL: f64 = 1e-12;
const CG_MAX_ITER: usize = 1000;

pub(crate) fn newton_direction_limited<T: Scalar, O: SmoothObjective<T> + ?Sized>(
    objective: &O,
    x: &[T],
    g: &[T],
    partition: &IndexPartition,
    bounds: &BoxBounds<T>,
    max_dim: usize,
) -> std::result::Result<DirectionBundle<T>, Unsolvable> {
    let theta = &partition.theta;
    let unsolvable = Unsolvable { theta_len: theta.len() };
    let rank_cap = objective.hessian_rank_bound().unwrap_or(usize::MAX);
    if theta.len() > max_dim || theta.len() > rank_cap {
        return Err(unsolvable);
    }
    let gamma = partition.gamma();
    let d_gamma = gamma_direction(x, partition, bounds);
    let mut d = vec![T::zero(); x.len()];
    for (&i, &v) in gamma.iter().zip(&d_gamma) {
        d[i] = v;
    }
    for &i in &partition.ibar {
        d[i] = -x[i];
    }

    if !theta.is_empty() {
        // coupling columns: Γ plus the nonzero part of x on Ī
        let mut cols = Vec::with_capacity(gamma.len());
        let mut vals = Vec::with_capacity(gamma.len());
        for &i in gamma.iter().chain(&partition.ibar) {
            if !d[i].is_zero() {
                cols.push(i);
                vals.push(d[i]);
            }
        }
        let mut rhs: Vec<T> = theta.iter().map(|&i| -g[i]).collect();
        if !cols.is_empty() {
            let coupling = objective
                .hessian_block_apply(x, theta, &cols, &vals)
                .map_err(|_| unsolvable)?;
            for (r, c) in rhs.iter_mut().zip(coupling) {
                *r -= c;
            }
        }
        let d_theta = if objective.cheap_hessian_blocks() && theta.len() <= DENSE_NEWTON_MAX {
            let h = objective.hessian_block(x, theta, theta).map_err(|_| unsolvable)?;
            SymmetricFactor::new(&h).ok_or(unsolvable)?.solve(&rhs)
        } else {
            let mut failed = false;
            let apply = |v: &[T]| match objective.hessian_block_apply(x, theta, theta, v) {
                Ok(hv) => hv,
                Err(_) => {
                    failed = true;
                    vec![T::nan(); v.len()]
                }
            };
            let iters = (2 * theta.len()).clamp(20, CG_MAX_ITER);
            let sol = linalg::conjugate_gradient(apply, &rhs, T::lit(CG_REL_TOL), iters);
            match sol {
                Some(v) if !failed => v,
                _ => return Err(unsolvable),
            }
        };
        if d_theta.iter().any(|v| !v.is_finite()) {
            return Err(unsolvable);
        }
        for (&i, v) in theta.iter().zip(d_theta) {
            d[i] = v;
        }
    }
    Ok(DirectionBundle {
        d,
        theta: theta.clone(),
        gamma,
        ibar: partition.ibar.clone(),
        kind: StepKind::Newton,
        solvable: true,
    })
}

/// Feasibility slack for `x + d ∈ Ω`, relative to the bound magnitude.
/// Accepted trial points are clamped, so the slack never leaks into iterates.
const FEAS_SLACK: f64 = 1e-12;

fn within_box<T: Scalar>(x: &[T], d: &[T], bounds: &BoxBounds<T>) -> bool {
    (0..x.len()).all(|i| {
        let v = x[i] + d[i];
        let slack = T::lit(FEAS_SLACK) * (T::one() + bounds.hi(i).max(-bounds.lo(i)));
        v >= bounds.lo(i) - slack && v <= bounds.hi(i) + slack
    })
}

/// The Newton acceptance test.
///
/// Strict mode requires `⟨g_I,d_I⟩ ≤ −δ‖d‖² + ‖x_Ī‖²/(4τ)` and
/// `|I_k| ≤ ‖x‖₀`; the default relaxed mode doubles the left side of the
/// first inequality and replaces the second with
/// `σβᾱ⟨g,d⟩ + λ(|I_k| − ‖x‖₀) ≤ ½σβᾱ⟨g,d⟩`. Both modes require `x + d ∈ Ω`
/// and either a new index in `Θ_k \ I_{k−1}` or `I_k = I_{k−1}`.
#[allow(clippy::too_many_arguments)]
pub fn accept_newton<T: Scalar>(
    bundle: &DirectionBundle<T>,
    x: &[T],
    g: &[T],
    partition: &IndexPartition,
    prev_support: &[usize],
    tau: T,
    lambda: T,
    bounds: &BoxBounds<T>,
    params: &SolverParams<T>,
) -> bool {
    let support = partition.support();
    let d = &bundle.d;
    let g_i_d_i = support.iter().fold(T::zero(), |acc, &i| acc + g[i] * d[i]);
    let d_sq = norm_sq(d);
    let x_ibar_sq = partition.ibar.iter().fold(T::zero(), |acc, &i| acc + x[i] * x[i]);
    let rhs = -params.delta * d_sq + x_ibar_sq / (T::lit(4.0) * tau);
    let nnz = linalg::nnz(x);

    let descent_ok;
    let growth_ok;
    if params.strict_acceptance {
        descent_ok = g_i_d_i <= rhs;
        growth_ok = support.len() <= nnz;
    } else {
        descent_ok = T::lit(2.0) * g_i_d_i <= rhs;
        let sba = params.sigma * params.beta * params.alpha_bar * dot(g, d);
        let growth = T::from_usize_lossy(support.len()) - T::from_usize_lossy(nnz);
        growth_ok = sba + lambda * growth <= T::lit(0.5) * sba;
    }
    if !(descent_ok && growth_ok) {
        return false;
    }
    if !within_box(x, d, bounds) {
        return false;
    }
    let new_in_theta = partition
        .theta
        .iter()
        .any(|i| prev_support.binary_search(i).is_err());
    new_in_theta || support.as_slice() == prev_support
}

/// `x̃(α)`: `Θ` moves by `α·d_Θ`, `Γ` is pinned to the bounds, `Ī` is zeroed.
pub fn trial_point<T: Scalar>(x: &[T], bundle: &DirectionBundle<T>, alpha: T, bounds: &BoxBounds<T>) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    for &i in &bundle.theta {
        out[i] = bounds.clamp(i, x[i] + alpha * bundle.d[i]);
    }
    for &i in &bundle.gamma {
        // d_Γ was built as bound − x, so recover the bound exactly
        let up = bounds.hi(i) - x[i];
        out[i] = if bundle.d[i] == up { bounds.hi(i) } else { bounds.lo(i) };
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmijoStep<T> {
    pub alpha: T,
    pub backtracks: usize,
    pub x: Vec<T>,
    pub f: T,
}

/// Smallest `m ≤ max_backtracks` with
/// `f(x̃(β^m)) ≤ f(x) + σβ^m⟨g,d⟩`; `None` if there is none.
#[allow(clippy::too_many_arguments)]
pub fn armijo_search<T: Scalar, O: SmoothObjective<T> + ?Sized>(
    objective: &O,
    x: &[T],
    f_x: T,
    g: &[T],
    bundle: &DirectionBundle<T>,
    bounds: &BoxBounds<T>,
    params: &SolverParams<T>,
) -> Option<ArmijoStep<T>> {
    let gd = dot(g, &bundle.d);
    let mut alpha = T::one();
    for m in 0..=params.max_backtracks {
        let xt = trial_point(x, bundle, alpha, bounds);
        let ft = objective.value(&xt);
        if ft <= f_x + params.sigma * alpha * gd {
            return Some(ArmijoStep {
                alpha,
                backtracks: m,
                x: xt,
                f: ft,
            });
        }
        alpha *= params.beta;
    }
    None
}

/// `prox_l0_box(x − τg, τλ)`
pub fn pgm_step<T: Scalar>(x: &[T], g: &[T], tau: T, lambda: T, bounds: &BoxBounds<T>) -> Result<Vec<T>> {
    check_len("gradient length", x.len(), g.len())?;
    let z: Vec<T> = x.iter().zip(g).map(|(&xi, &gi)| xi - tau * gi).collect();
    prox_l0_box(&z, tau * lambda, bounds)
}

fn pgm_bundle<T: Scalar>(x: &[T], x_next: &[T], partition: &IndexPartition) -> DirectionBundle<T> {
    DirectionBundle {
        d: x_next.iter().zip(x).map(|(&a, &b)| a - b).collect(),
        theta: partition.theta.clone(),
        gamma: partition.gamma(),
        ibar: partition.ibar.clone(),
        kind: StepKind::Pgm,
        solvable: false,
    }
}

/// `⟨d, H d⟩` with `H = [∇²_{Θ,·}f; 0 I_Γ 0; 0 0 I_Ī]` over all indices.
pub fn quad_form_full<T: Scalar, O: SmoothObjective<T> + ?Sized>(
    objective: &O,
    x: &[T],
    bundle: &DirectionBundle<T>,
) -> Result<T> {
    let all: Vec<usize> = (0..x.len()).collect();
    let h_theta_d = objective.hessian_block_apply(x, &bundle.theta, &all, &bundle.d)?;
    Ok(dot(&bundle.d_theta(), &h_theta_d) + norm_sq(&bundle.d_gamma()) + norm_sq(&bundle.d_ibar()))
}

/// The same form restricted to `I_k ∪ J_k` with `J_k = I_{k−1} \ I_k`.
pub fn quad_form_reduced<T: Scalar, O: SmoothObjective<T> + ?Sized>(
    objective: &O,
    x: &[T],
    bundle: &DirectionBundle<T>,
    prev_support: &[usize],
) -> Result<T> {
    let support = bundle.support();
    let j: Vec<usize> = prev_support
        .iter()
        .copied()
        .filter(|i| support.binary_search(i).is_err())
        .collect();
    let mut reduced: Vec<usize> = support.iter().chain(&j).copied().collect();
    reduced.sort_unstable();
    let d_r = linalg::gather(&bundle.d, &reduced);
    let h_theta_d = objective.hessian_block_apply(x, &bundle.theta, &reduced, &d_r)?;
    let d_j = linalg::gather(&bundle.d, &j);
    Ok(dot(&bundle.d_theta(), &h_theta_d) + norm_sq(&bundle.d_gamma()) + norm_sq(&d_j))
}

/// What one iteration of a solver hands back to the shared driver.
pub(crate) struct StepOutcome<T> {
    pub x: Vec<T>,
    pub f: T,
    pub kind: StepKind,
    pub tau_used: T,
    pub partition: Option<IndexPartition>,
    pub bundle: Option<DirectionBundle<T>>,
    /// Index set remembered as `I_{k−1}` for the next iteration.
    pub support: Vec<usize>,
}

pub(crate) struct StepContext<'a, T> {
    pub lambda: T,
    pub tau: T,
    pub x: &'a [T],
    pub f: T,
    pub g: &'a [T],
    pub prev_support: &'a [usize],
}

/// Callback invoked after every accepted step.
pub type Observer<'o, T> = &'o mut dyn FnMut(&IterationRecord<'_, T>);

/// Homotopy, stopping rule, bookkeeping and reporting shared by all solvers.
pub(crate) fn drive<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
    observer: Option<Observer<'_, T>>,
    mut step: impl FnMut(&StepContext<'_, T>) -> Result<StepOutcome<T>>,
) -> Result<SolverReport<T>> {
    crate::model::validate_problem(problem)?;
    params.validate()?;
    let start = Instant::now();
    let n = problem.dim();
    let bounds = &problem.bounds;
    let mut x = match x0 {
        Some(x0) => {
            check_len("start point length", n, x0.len())?;
            if let Some(index) = (0..n).find(|&i| x0[i] < bounds.lo(i) || x0[i] > bounds.hi(i)) {
                return Err(Error::InfeasiblePoint { index });
            }
            x0.to_vec()
        }
        None => vec![T::zero(); n],
    };
    let lambda0 = params.lambda0.max(problem.lambda_target);
    let schedule = |k| lambda_schedule(problem.lambda_target, lambda0, params.lambda_decay, k);
    let (mut f, mut g) = problem.objective.value_and_gradient(&x);
    let mut prev_support: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut newton_steps = 0;
    let mut pgm_steps = 0;
    let mut observer = observer;
    let mut lambda = schedule(0);
    let mut tau = tau_for(bounds, lambda, params);
    let mut k = 0;

    let stop = loop {
        if f <= params.tol_f {
            break StopReason::ObjectiveTolerance;
        }
        if k >= params.max_iter {
            break StopReason::MaxIterations;
        }
        let lambda_k = schedule(k);
        if lambda_k != lambda {
            lambda = lambda_k;
            tau = tau_for(bounds, lambda, params);
        }
        let ctx = StepContext {
            lambda,
            tau,
            x: &x,
            f,
            g: &g,
            prev_support: &prev_support,
        };
        let out = step(&ctx)?;
        let (f_next, g_next) = problem.objective.value_and_gradient(&out.x);
        debug_assert!((f_next - out.f).abs() <= T::lit(1e-9) * (T::one() + f_next.abs()));
        if let Some(obs) = observer.as_mut() {
            obs(&IterationRecord {
                k,
                lambda,
                tau: out.tau_used,
                x_prev: &x,
                x_next: &out.x,
                grad_prev: &g,
                f_prev: f,
                f_next,
                kind: out.kind,
                partition: out.partition.as_ref(),
                prev_support: &prev_support,
                bundle: out.bundle.as_ref(),
            });
        }
        match out.kind {
            StepKind::Newton => newton_steps += 1,
            StepKind::Pgm => pgm_steps += 1,
        }
        let step_norm = linalg::dist(&out.x, &x);
        let rel = step_norm / norm(&out.x).max(T::one());
        let nnz = linalg::nnz(&out.x);
        history.push(HistoryEntry {
            k,
            lambda,
            f: f_next,
            phi: f_next + lambda * T::from_usize_lossy(nnz),
            step_norm,
            kind: out.kind,
            nnz,
        });
        x = out.x;
        f = f_next;
        g = g_next;
        prev_support = out.support;
        k += 1;
        if lambda == problem.lambda_target && rel <= params.tol_rel && f > params.tol_f {
            break StopReason::RelativeChange;
        }
    };

    let partition = partition_indices(&x, &g, tau, lambda, bounds)?;
    let residual = residual_f(&x, &g, tau, &partition, bounds)?;
    Ok(SolverReport {
        nnz: linalg::nnz(&x),
        x_final: x,
        iterations: k,
        wall_time: start.elapsed().as_secs_f64(),
        f_final: f,
        residual_norm: residual.norm,
        newton_steps,
        pgm_steps,
        lambda_final: lambda,
        tau_final: tau,
        stop,
        history,
    })
}

/// Runs BNL0R from `x0` (the origin when `None`).
pub fn solve_bnl0r<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
) -> Result<SolverReport<T>> {
    solve_bnl0r_impl(problem, params, x0, None)
}

/// As [`solve_bnl0r`], calling `observer` after every step.
pub fn solve_bnl0r_observed<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
    observer: &mut dyn FnMut(&IterationRecord<'_, T>),
) -> Result<SolverReport<T>> {
    solve_bnl0r_impl(problem, params, x0, Some(observer))
}

fn solve_bnl0r_impl<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
    observer: Option<Observer<'_, T>>,
) -> Result<SolverReport<T>> {
    let obj = &problem.objective;
    let bounds = &problem.bounds;
    drive(problem, params, x0, observer, |ctx| {
        let partition = partition_indices(ctx.x, ctx.g, ctx.tau, ctx.lambda, bounds)?;
        let support = partition.support();
        let newton = newton_direction_limited(obj, ctx.x, ctx.g, &partition, bounds, params.max_newton_dim)
            .ok()
            .filter(|b| {
                accept_newton(b, ctx.x, ctx.g, &partition, ctx.prev_support, ctx.tau, ctx.lambda, bounds, params)
            })
            .and_then(|b| {
                let step = armijo_search(obj, ctx.x, ctx.f, ctx.g, &b, bounds, params)?;
                // keep the merit monotone at the current penalty
                let phi_old = ctx.f + ctx.lambda * T::from_usize_lossy(linalg::nnz(ctx.x));
                let phi_new = step.f + ctx.lambda * T::from_usize_lossy(linalg::nnz(&step.x));
                (phi_new <= phi_old).then_some((b, step))
            });
        Ok(match newton {
            Some((bundle, step)) => StepOutcome {
                x: step.x,
                f: step.f,
                kind: StepKind::Newton,
                tau_used: ctx.tau,
                partition: Some(partition),
                bundle: Some(bundle),
                support,
            },
            None => {
                let x_next = pgm_step(ctx.x, ctx.g, ctx.tau, ctx.lambda, bounds)?;
                let f_next = obj.value(&x_next);
                let bundle = pgm_bundle(ctx.x, &x_next, &partition);
                StepOutcome {
                    x: x_next,
                    f: f_next,
                    kind: StepKind::Pgm,
                    tau_used: ctx.tau,
                    partition: Some(partition),
                    bundle: Some(bundle),
                    support,
                }
            }
        })
    })
}
