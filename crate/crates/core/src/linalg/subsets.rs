use itertools::Itertools;
use nalgebra::DMatrix;

use super::DenseMatrix;
use crate::error::{Result, Sl0Error};

/// Largest column count accepted by the exhaustive subset routines.
pub const MAX_SUBSET_COLS: usize = 20;
/// Largest `C(m, n)` accepted by the exhaustive subset routines.
pub const MAX_ENUMERATIONS: u128 = 1_000_000;

const DET_TOL: f64 = 1e-10;

fn binomial(m: usize, k: usize) -> u128 {
    let k = k.min(m - k.min(m));
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i as u128 + 1))
}

fn guard(a: &DenseMatrix, what: &'static str) -> Result<()> {
    let (n, m) = (a.rows(), a.cols());
    if n > m {
        return Err(Sl0Error::NotUnderdetermined { rows: n, cols: m });
    }
    let count = binomial(m, n);
    if m > MAX_SUBSET_COLS || count > MAX_ENUMERATIONS {
        return Err(Sl0Error::TooLarge {
            what,
            count,
            limit: MAX_ENUMERATIONS,
            max_cols: MAX_SUBSET_COLS,
        });
    }
    Ok(())
}

fn submatrix(a: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])])
}

/// True iff every `n x n` column submatrix of `A` is invertible, judged by
/// `|det| > 1e-10` after scaling each column to unit norm.
pub fn check_urp(a: &DenseMatrix) -> Result<bool> {
    guard(a, "URP check")?;
    let mut normalized = a.as_nalgebra().clone();
    for mut col in normalized.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 {
            return Ok(false);
        }
        col /= norm;
    }
    let n = a.rows();
    Ok((0..a.cols())
        .combinations(n)
        .all(|cols| submatrix(&normalized, &cols).determinant().abs() > DET_TOL))
}

/// The constant `M`: the largest Frobenius norm of the Moore-Penrose
/// pseudoinverse over all column submatrices with at most `n` columns.
pub fn compute_m(a: &DenseMatrix) -> Result<f64> {
    guard(a, "M computation")?;
    if !check_urp(a)? {
        return Err(Sl0Error::NotUrp);
    }
    let full = a.as_nalgebra();
    let mut best = 0.0_f64;
    for size in 1..=a.rows() {
        for cols in (0..a.cols()).combinations(size) {
            let sub = submatrix(full, &cols);
            // ||pinv(B)||_F^2 = sum over singular values of 1 / sigma^2
            let sq: f64 = sub
                .singular_values()
                .iter()
                .map(|sv| 1.0 / (sv * sv))
                .sum();
            best = best.max(sq.sqrt());
        }
    }
    Ok(best)
}
