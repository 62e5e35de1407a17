//! First-order comparison solvers sharing the BNL0R homotopy and stop rule.
//!
//! * PIHT: proximal iterative hard thresholding on the ℓ0 model,
//!   `x⁺ = prox_l0_box(x − g/L, λ/L)`.
//! * PGA: proximal gradient on the ℓ1 relaxation with monotone backtracking.

use crate::error::Result;
use crate::linalg::{self, dot, norm_sq};
use crate::model::{Problem, SmoothObjective, SolverParams, SolverReport, StepKind};
use crate::prox::{prox_l0_box, prox_l1_box};
use crate::scalar::Scalar;
use crate::solver::{drive, Observer, StepOutcome};
use crate::stationarity::partition_indices;

/// How PIHT chooses its curvature `L_k` (step `1/L_k`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub enum PihtStep<T> {
    /// `L_k = L̂` every iteration.
    #[default]
    Fixed,
    /// Barzilai–Borwein initial guess clamped to `[l_min, l_max]`, then
    /// multiplied by `growth` until
    /// `φ(x⁺) ≤ φ(x) − (c/2)‖x⁺ − x‖²`.
    LineSearch { l_min: T, l_max: T, growth: T, c: T },
}


impl<T: Scalar> PihtStep<T> {
    /// Line search with `L ∈ [1e-8, 1e8]`, doubling, and `c = 1e-4`.
    pub fn line_search() -> Self {
        PihtStep::LineSearch {
            l_min: T::lit(1e-8),
            l_max: T::lit(1e8),
            growth: T::lit(2.0),
            c: T::lit(1e-4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PihtOptions<T> {
    pub step: PihtStep<T>,
    /// Cap on curvature increases per iteration.
    pub max_increases: usize,
}

impl<T: Scalar> Default for PihtOptions<T> {
    fn default() -> Self {
        Self {
            step: PihtStep::default(),
            max_increases: 60,
        }
    }
}

/// PIHT with the fixed step `1/L̂`.
pub fn solve_piht<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
) -> Result<SolverReport<T>> {
    solve_piht_with(problem, params, x0, &PihtOptions::default(), None)
}

pub fn solve_piht_with<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
    options: &PihtOptions<T>,
    observer: Option<Observer<'_, T>>,
) -> Result<SolverReport<T>> {
    let obj = &problem.objective;
    let bounds = &problem.bounds;
    let l_hat = params.lipschitz_estimate;
    let a = bounds.a();
    let mut memory: Option<(Vec<T>, Vec<T>)> = None;
    drive(problem, params, x0, observer, |ctx| {
        // the prox needs 2λ/L < a
        let l_floor = T::lit(2.0) * ctx.lambda / (T::lit(0.99) * a);
        let nnz = T::from_usize_lossy(linalg::nnz(ctx.x));
        let phi = ctx.f + ctx.lambda * nnz;
        let mut l_k = match options.step {
            PihtStep::Fixed => l_hat,
            PihtStep::LineSearch { l_min, l_max, .. } => {
                let bb = match &memory {
                    Some((x_old, g_old)) => {
                        let s: Vec<T> = ctx.x.iter().zip(x_old).map(|(&p, &q)| p - q).collect();
                        let y: Vec<T> = ctx.g.iter().zip(g_old).map(|(&p, &q)| p - q).collect();
                        let ss = norm_sq(&s);
                        if ss > T::zero() {
                            dot(&s, &y) / ss
                        } else {
                            l_hat
                        }
                    }
                    None => l_hat,
                };
                bb.max(l_min).min(l_max)
            }
        }
        .max(l_floor);

        let mut increases = 0;
        let (x_next, f_next) = loop {
            let tau = T::one() / l_k;
            let z: Vec<T> = ctx.x.iter().zip(ctx.g).map(|(&xi, &gi)| xi - tau * gi).collect();
            let cand = prox_l0_box(&z, ctx.lambda * tau, bounds)?;
            let f_c = obj.value(&cand);
            let PihtStep::LineSearch { growth, c, .. } = options.step else {
                break (cand, f_c);
            };
            let phi_c = f_c + ctx.lambda * T::from_usize_lossy(linalg::nnz(&cand));
            let dx = linalg::dist(&cand, ctx.x);
            if phi_c <= phi - c / T::lit(2.0) * dx * dx || increases >= options.max_increases {
                break (cand, f_c);
            }
            l_k *= growth;
            increases += 1;
        };
        memory = Some((ctx.x.to_vec(), ctx.g.to_vec()));
        let tau_used = T::one() / l_k;
        let partition = partition_indices(ctx.x, ctx.g, tau_used, ctx.lambda, bounds)?;
        Ok(StepOutcome {
            support: linalg::support(&x_next),
            x: x_next,
            f: f_next,
            kind: StepKind::Pgm,
            tau_used,
            partition: Some(partition),
            bundle: None,
        })
    })
}

/// `F(x) = f(x) + λ‖x‖₁` (the box indicator is implicit for feasible `x`).
pub fn l1_merit<T: Scalar, O: SmoothObjective<T> + ?Sized>(objective: &O, x: &[T], lambda: T) -> T {
    objective.value(x) + lambda * x.iter().fold(T::zero(), |acc, v| acc + v.abs())
}

/// Proximal gradient on the ℓ1 relaxation with step halving from `1/L̂`.
pub fn solve_pga<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
) -> Result<SolverReport<T>> {
    solve_pga_observed(problem, params, x0, None)
}

pub fn solve_pga_observed<T: Scalar, O: SmoothObjective<T>>(
    problem: &Problem<T, O>,
    params: &SolverParams<T>,
    x0: Option<&[T]>,
    observer: Option<Observer<'_, T>>,
) -> Result<SolverReport<T>> {
    let obj = &problem.objective;
    let bounds = &problem.bounds;
    drive(problem, params, x0, observer, |ctx| {
        let mut t = T::one() / params.lipschitz_estimate;
        let mut tries = 0;
        let (x_next, f_next) = loop {
            let z: Vec<T> = ctx.x.iter().zip(ctx.g).map(|(&xi, &gi)| xi - t * gi).collect();
            let cand = prox_l1_box(&z, t * ctx.lambda, bounds)?;
            let f_c = obj.value(&cand);
            let dx: Vec<T> = cand.iter().zip(ctx.x).map(|(&p, &q)| p - q).collect();
            let model = ctx.f + dot(ctx.g, &dx) + norm_sq(&dx) / (T::lit(2.0) * t);
            // slack for cancellation when the model is exact
            let slack = T::lit(1e-12) * (T::one() + ctx.f.abs());
            if f_c <= model + slack || tries >= params.max_backtracks {
                break (cand, f_c);
            }
            t *= T::lit(0.5);
            tries += 1;
        };
        Ok(StepOutcome {
            support: linalg::support(&x_next),
            x: x_next,
            f: f_next,
            kind: StepKind::Pgm,
            tau_used: t,
            partition: None,
            bundle: None,
        })
    })
}
