//! Sparse solutions of underdetermined linear systems by smoothed l0
//! maximisation.
//!
//! Given `A` (`n x m`, `n < m`, full row rank) and `x`, [`solver::sl0_solve`]
//! looks for the `s` with the fewest nonzeros satisfying `A s = x`. The
//! discontinuous l0 count is replaced by the smooth surrogate
//! `m - F_sigma(s)` from [`penalty`], which is maximised on the feasible set
//! for a decreasing sequence of `sigma`.
//!
//! ```
//! use sl0::linalg::{DenseMatrix, DenseVector};
//! use sl0::solver::{sl0_solve, SolverConfig};
//!
//! let a = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.5], vec![0.0, 1.0, 0.5]]).unwrap();
//! let x = DenseVector::from_vec(vec![1.0, 0.0]).unwrap();
//! let report = sl0_solve(&a, &x, &SolverConfig::default()).unwrap();
//! assert!((report.estimate.as_slice()[0] - 1.0).abs() < 1e-2);
//! ```
//!
//! [`expgen`] generates Bernoulli-Gaussian test problems and runs Monte
//! Carlo parameter sweeps over them.

pub mod error;
pub mod expgen;
pub mod linalg;
pub mod penalty;
pub mod solver;

pub use error::{Result, Sl0Error};
