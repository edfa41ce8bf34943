//! Iteratively reweighted least squares (FOCUSS-style) baseline.

use nalgebra::{Cholesky, DVector};

use crate::error::{Result, Sl0Error};
use crate::linalg::{DenseMatrix, DenseVector, ProjectorFactor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsConfig {
    /// Target quasi-norm exponent; `0` approximates the l0 count.
    pub p_norm: f64,
    pub iterations: usize,
    /// Added to every weight so `A W A^T` stays invertible.
    pub regularizer: f64,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        Self {
            p_norm: 0.0,
            iterations: 50,
            regularizer: 1e-8,
        }
    }
}

/// Iterates `s <- W A^T (A W A^T)^{-1} x` with `W = diag(|s_i|^(2-p) + eps)`
/// from the minimum-norm solution.
pub fn irls_solve(a: &DenseMatrix, x: &DenseVector, cfg: &IrlsConfig) -> Result<DenseVector> {
    if !(0.0..=2.0).contains(&cfg.p_norm) || cfg.regularizer.is_nan() || cfg.regularizer < 0.0 {
        return Err(Sl0Error::InvalidConfig(format!(
            "IRLS needs 0 <= p <= 2 and a non-negative regularizer (got p = {}, eps = {})",
            cfg.p_norm, cfg.regularizer
        )));
    }
    let factor = ProjectorFactor::new(a)?;
    let (n, _) = factor.dims();
    if x.len() != n {
        return Err(Sl0Error::DimensionMismatch(format!(
            "x has length {}, A has {n} rows",
            x.len()
        )));
    }
    let xv = x.as_nalgebra();
    let am = factor.matrix();
    let mut s = factor.apply_raw(xv);
    if xv.iter().all(|v| *v == 0.0) {
        return DenseVector::from_nalgebra(s);
    }

    let exponent = 2.0 - cfg.p_norm;
    for _ in 0..cfg.iterations {
        let w: DVector<f64> = s.map(|v| v.abs().powf(exponent) + cfg.regularizer);
        let mut aw = am.clone();
        for (mut col, wi) in aw.column_iter_mut().zip(w.iter()) {
            col *= *wi;
        }
        let gram = &aw * am.transpose();
        // Weights collapse towards zero as the iterate sparsifies; once the
        // weighted Gram matrix is no longer positive definite, stop.
        let Some(chol) = Cholesky::new(gram) else {
            break;
        };
        let y = chol.solve(xv);
        let next = aw.tr_mul(&y);
        if !next.iter().all(|v| v.is_finite()) {
            break;
        }
        let change = (&next - &s).norm();
        s = next;
        if change <= 1e-12 * s.norm() {
            break;
        }
    }
    // The weighted solve loses accuracy as W degenerates; restore A s = x.
    factor.project_raw(&mut s, xv);
    DenseVector::from_nalgebra(s)
}
