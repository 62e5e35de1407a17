//! Index partition at the prox-gradient trial point, the stationarity
//! residual built on it, and a componentwise τ-stationarity test.

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, norm_sq};
use crate::model::BoxBounds;
use crate::prox::check_threshold;
use crate::scalar::Scalar;

/// Split of `{0,…,n−1}` by the trial point `z = x − τg`.
///
/// * `theta`: `−l < z < u` and `|z| ≥ √(2τλ)`
/// * `gamma_u`: `z ≥ u`
/// * `gamma_l`: `z ≤ −l`
/// * `ibar`: everything else
///
/// All four lists are sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexPartition {
    pub theta: Vec<usize>,
    pub gamma_u: Vec<usize>,
    pub gamma_l: Vec<usize>,
    pub ibar: Vec<usize>,
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl IndexPartition {
    pub fn dim(&self) -> usize {
        self.theta.len() + self.gamma_u.len() + self.gamma_l.len() + self.ibar.len()
    }

    /// `Γ = Γᵘ ∪ Γˡ`, sorted.
    pub fn gamma(&self) -> Vec<usize> {
        merge_sorted(&self.gamma_u, &self.gamma_l)
    }

    /// `I = Θ ∪ Γ`, sorted.
    pub fn support(&self) -> Vec<usize> {
        merge_sorted(&self.theta, &self.gamma())
    }

    pub fn support_len(&self) -> usize {
        self.theta.len() + self.gamma_u.len() + self.gamma_l.len()
    }
}

/// Computes the partition at `z = x − τg` with threshold `√(2τλ)`.
pub fn partition_indices<T: Scalar>(
    x: &[T],
    g: &[T],
    tau: T,
    lambda: T,
    bounds: &BoxBounds<T>,
) -> Result<IndexPartition> {
    check_len("iterate length", bounds.dim(), x.len())?;
    check_len("gradient length", bounds.dim(), g.len())?;
    check_threshold(tau * lambda, bounds)?;
    let thr = (T::lit(2.0) * tau * lambda).sqrt();
    let mut p = IndexPartition::default();
    for i in 0..x.len() {
        let z = x[i] - tau * g[i];
        if z >= bounds.hi(i) {
            p.gamma_u.push(i);
        } else if z <= bounds.lo(i) {
            p.gamma_l.push(i);
        } else if z.abs() >= thr {
            p.theta.push(i);
        } else {
            p.ibar.push(i);
        }
    }
    Ok(p)
}

/// Blocks of `F_τ = [∇_Θ f; x_Γ − Π_Ω(x − τ∇f)_Γ; x_Ī]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualF<T> {
    pub theta_part: Vec<T>,
    /// Ordered like [`IndexPartition::gamma`].
    pub gamma_part: Vec<T>,
    pub ibar_part: Vec<T>,
    pub norm: T,
}

pub fn residual_f<T: Scalar>(
    x: &[T],
    g: &[T],
    tau: T,
    partition: &IndexPartition,
    bounds: &BoxBounds<T>,
) -> Result<ResidualF<T>> {
    check_len("iterate length", bounds.dim(), x.len())?;
    check_len("gradient length", bounds.dim(), g.len())?;
    check_len("partition size", bounds.dim(), partition.dim())?;
    let theta_part = linalg::gather(g, &partition.theta);
    let gamma_part: Vec<T> = partition
        .gamma()
        .into_iter()
        .map(|i| x[i] - bounds.clamp(i, x[i] - tau * g[i]))
        .collect();
    let ibar_part = linalg::gather(x, &partition.ibar);
    let norm = (norm_sq(&theta_part) + norm_sq(&gamma_part) + norm_sq(&ibar_part)).sqrt();
    Ok(ResidualF {
        theta_part,
        gamma_part,
        ibar_part,
        norm,
    })
}

/// Default tolerance for [`check_tau_stationary`].
pub const STATIONARITY_TOL: f64 = 1e-8;

/// Componentwise τ-stationarity test.
///
/// Each component must fit one of: interior with `|x_i| ≥ √(2τλ)` and
/// `|g_i| ≤ tol`; at `u_i` with `g_i ≤ tol`; at `−l_i` with `g_i ≥ −tol`;
/// zero with `|g_i| ≤ √(2λ/τ) + tol`.
pub fn check_tau_stationary<T: Scalar>(
    x: &[T],
    g: &[T],
    tau: T,
    lambda: T,
    bounds: &BoxBounds<T>,
    tol: T,
) -> Result<bool> {
    check_len("iterate length", bounds.dim(), x.len())?;
    check_len("gradient length", bounds.dim(), g.len())?;
    if let Some(index) = (0..x.len()).find(|&i| x[i] < bounds.lo(i) - tol || x[i] > bounds.hi(i) + tol) {
        return Err(Error::InfeasiblePoint { index });
    }
    let two = T::lit(2.0);
    let small = (two * tau * lambda).sqrt();
    let grad_cap = (two * lambda / tau).sqrt();
    Ok((0..x.len()).all(|i| {
        let (xi, gi) = (x[i], g[i]);
        if xi.abs() <= tol {
            gi.abs() <= grad_cap + tol
        } else if xi >= bounds.hi(i) - tol {
            gi <= tol
        } else if xi <= bounds.lo(i) + tol {
            gi >= -tol
        } else if xi.abs() >= small - tol {
            gi.abs() <= tol
        } else {
            false
        }
    }))
}
