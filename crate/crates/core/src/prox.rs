//! Proximal and projection operators for the box-constrained penalties.

use crate::error::{check_len, Error, Result};
use crate::model::BoxBounds;
use crate::scalar::Scalar;

/// Euclidean projection onto the box.
pub fn box_project<T: Scalar>(z: &[T], bounds: &BoxBounds<T>) -> Result<Vec<T>> {
    check_len("vector length", bounds.dim(), z.len())?;
    Ok(z.iter().enumerate().map(|(i, &v)| bounds.clamp(i, v)).collect())
}

pub(crate) fn check_threshold<T: Scalar>(tau_lambda: T, bounds: &BoxBounds<T>) -> Result<()> {
    let a = bounds.a();
    let two = T::lit(2.0) * tau_lambda;
    if !(two < a) {
        return Err(Error::ThresholdTooLarge {
            two_tau_lambda: two.to_f64_lossy(),
            a: a.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Componentwise minimizer of `½(y−z)² + τλ‖y‖₀` over `[−l, u]`.
///
/// A component exactly at the threshold `√(2τλ)` keeps its value, so this
/// operator and [`crate::stationarity::partition_indices`] always agree.
pub fn prox_l0_box<T: Scalar>(z: &[T], tau_lambda: T, bounds: &BoxBounds<T>) -> Result<Vec<T>> {
    check_len("vector length", bounds.dim(), z.len())?;
    check_threshold(tau_lambda, bounds)?;
    let thr = (T::lit(2.0) * tau_lambda).sqrt();
    Ok(z.iter()
        .enumerate()
        .map(|(i, &zi)| prox_l0_scalar(zi, thr, bounds.lo(i), bounds.hi(i)))
        .collect())
}

#[inline]
pub(crate) fn prox_l0_scalar<T: Scalar>(z: T, thr: T, lo: T, hi: T) -> T {
    if z >= hi {
        hi
    } else if z <= lo {
        lo
    } else if z.abs() >= thr {
        z
    } else {
        T::zero()
    }
}

/// Soft thresholding followed by clamping; exact because the box contains 0.
pub fn prox_l1_box<T: Scalar>(z: &[T], tau_lambda: T, bounds: &BoxBounds<T>) -> Result<Vec<T>> {
    check_len("vector length", bounds.dim(), z.len())?;
    if tau_lambda < T::zero() {
        return Err(Error::InvalidParameter("tau_lambda must be nonnegative".into()));
    }
    Ok(z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            let shrunk = zi.signum() * (zi.abs() - tau_lambda).max(T::zero());
            bounds.clamp(i, shrunk)
        })
        .collect())
}

/// `h(y) = ½(y−z)² + τλ·[y ≠ 0]`
pub fn prox_objective_1d(y: f64, z: f64, tau_lambda: f64) -> f64 {
    0.5 * (y - z) * (y - z) + if y != 0.0 { tau_lambda } else { 0.0 }
}

/// Brute-force minimizer of the scalar ℓ0-box subproblem over a grid on
/// `[−l, u]` plus the candidates `0` and `clamp(z)`.
///
/// Ties go to the candidate with larger magnitude.
pub fn prox_oracle_1d(z: f64, tau_lambda: f64, l: f64, u: f64, grid_step: f64) -> f64 {
    assert!(grid_step > 0.0, "grid step must be positive");
    let h = |y: f64| prox_objective_1d(y, z, tau_lambda);
    let mut best: f64 = 0.0;
    let mut best_h = h(0.0);
    let mut consider = |y: f64| {
        let hy = h(y);
        if hy < best_h || (hy == best_h && y.abs() > best.abs()) {
            best = y;
            best_h = hy;
        }
    };
    let steps = ((l + u) / grid_step).floor() as usize;
    for k in 0..=steps {
        consider((-l + k as f64 * grid_step).min(u));
    }
    consider(u);
    consider(z.clamp(-l, u));
    best
}
