//! Subspace Newton method for box-constrained ℓ0-regularized minimization
//!
//! ```text
//! min f(x) + λ‖x‖₀   subject to   −l ≤ x ≤ u
//! ```
//!
//! together with two first-order baselines (proximal iterative hard
//! thresholding and an ℓ1 proximal gradient method), the closed-form
//! proximal operators they rely on, linear operators for compressed sensing
//! and generators for the benchmark experiments.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiation.
//!
//! ```
//! use boxl0::{BoxBounds, LeastSquaresObjective, Problem, SolverParams, solver};
//! use boxl0::linalg::DenseMatrix;
//!
//! let a = DenseMatrix::<f64>::identity(3);
//! let obj = LeastSquaresObjective::new(a, vec![1.0, 0.0, 0.0]).unwrap();
//! let problem = Problem::new(obj, BoxBounds::symmetric(3, 3.0).unwrap(), 1e-4).unwrap();
//! let params = SolverParams::new(1.0, 1e-4);
//! let report = solver::solve_bnl0r(&problem, &params, None).unwrap();
//! assert!((report.x_final[0] - 1.0).abs() < 1e-12);
//! assert_eq!(report.nnz, 1);
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod error;
pub mod linalg;
pub mod model;
pub mod operators;
pub mod prox;
pub mod scalar;
pub mod solver;
pub mod stationarity;

pub use error::{Error, Result};
pub use model::{
    BoxBounds, HistoryEntry, IterateState, IterationRecord, LeastSquaresObjective, Problem, SmoothObjective,
    SolverParams, SolverReport, StepKind, StopReason,
};
pub use operators::{ComposedMap, HaarDirection, HaarMap, IdentityMap, LinearMap, PartialDftMap};
pub use scalar::Scalar;
pub use stationarity::{IndexPartition, ResidualF};

pub type BoxBounds64 = BoxBounds<f64>;
pub type SolverParams64 = SolverParams<f64>;
pub type SolverReport64 = SolverReport<f64>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
/// Real least squares with a dense matrix.
pub type DenseLeastSquares64 = LeastSquaresObjective<f64, f64, linalg::DenseMatrix<f64>>;
/// Complex-measurement least squares with `A = F_S W⁻¹`.
pub type ImageLeastSquares64 =
    LeastSquaresObjective<f64, num_complex::Complex<f64>, ComposedMap<PartialDftMap<f64>, HaarMap>>;
