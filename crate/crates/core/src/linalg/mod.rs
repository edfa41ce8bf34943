//! Dense linear algebra for underdetermined systems `A s = x`.
//!
//! [`ProjectorFactor`] holds a Cholesky factor of `A A^T` and applies the
//! affine projection `s - A^T (A A^T)^{-1} (A s - x)` that the solver uses
//! after every ascent step. The combinatorial quantities in [`subsets`] (URP
//! check and the constant `M`) are only exposed for small matrices.

mod subsets;
mod textio;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Result, Sl0Error};

pub use subsets::{check_urp, compute_m, MAX_ENUMERATIONS, MAX_SUBSET_COLS};
pub use textio::{format_matrix, format_vector, parse_matrix, parse_vector};

/// Condition estimate of `A A^T` above which a factor is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Real matrix with finite entries and at least one row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Sl0Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, &data))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Sl0Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(n, m, rows.concat())
    }

    pub fn from_nalgebra(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Sl0Error::Empty);
        }
        // Report the row-major index of the offending entry.
        let cols = inner.ncols();
        if let Some((i, j)) = (0..inner.nrows())
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !inner[(i, j)].is_finite())
        {
            return Err(Sl0Error::NonFinite { index: i * cols + j });
        }
        Ok(Self { inner })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn column(&self, j: usize) -> DenseVector {
        DenseVector {
            inner: self.inner.column(j).into_owned(),
        }
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.inner.transpose().as_slice().to_vec()
    }

    pub fn mul_vec(&self, v: &DenseVector) -> Result<DenseVector> {
        if v.len() != self.cols() {
            return Err(Sl0Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows(),
                self.cols(),
                v.len()
            )));
        }
        Ok(DenseVector {
            inner: &self.inner * &v.inner,
        })
    }
}

/// Real vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    inner: DVector<f64>,
}

impl DenseVector {
    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Sl0Error::NonFinite { index });
        }
        Ok(Self {
            inner: DVector::from_vec(data),
        })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            inner: DVector::zeros(len),
        }
    }

    pub fn from_nalgebra(inner: DVector<f64>) -> Result<Self> {
        if let Some(index) = inner.iter().position(|v| !v.is_finite()) {
            return Err(Sl0Error::NonFinite { index });
        }
        Ok(Self { inner })
    }

    /// Wraps a vector the caller knows to be finite.
    pub(crate) fn from_nalgebra_unchecked(inner: DVector<f64>) -> Self {
        debug_assert!(inner.iter().all(|v| v.is_finite()));
        Self { inner }
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.inner.as_slice()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.inner.as_slice().to_vec()
    }

    pub fn as_nalgebra(&self) -> &DVector<f64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DVector<f64> {
        self.inner
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }
}

/// Cholesky factor of `A A^T` together with `A`, for repeated projections
/// onto `{s : A s = x}`. Immutable once built; share it freely across threads.
#[derive(Debug, Clone)]
pub struct ProjectorFactor {
    a: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    condition: f64,
}

impl ProjectorFactor {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let (n, m) = (a.rows(), a.cols());
        if n > m {
            return Err(Sl0Error::NotUnderdetermined { rows: n, cols: m });
        }
        let a = a.as_nalgebra().clone();
        let gram = &a * a.transpose();
        let chol = Cholesky::new(gram.clone()).ok_or(Sl0Error::RankDeficient {
            condition: f64::INFINITY,
        })?;
        let condition = estimate_condition(&gram, &chol);
        if condition.is_nan() || condition > MAX_CONDITION {
            return Err(Sl0Error::RankDeficient { condition });
        }
        Ok(Self { a, chol, condition })
    }

    /// `(n, m)` of the source matrix.
    pub fn dims(&self) -> (usize, usize) {
        (self.a.nrows(), self.a.ncols())
    }

    /// Estimated 2-norm condition number of `A A^T`.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// `A^T (A A^T)^{-1} v`.
    pub fn apply(&self, v: &DenseVector) -> Result<DenseVector> {
        self.check_rows(v.len())?;
        Ok(DenseVector::from_nalgebra_unchecked(self.apply_raw(v.as_nalgebra())))
    }

    pub(crate) fn apply_raw(&self, v: &DVector<f64>) -> DVector<f64> {
        let y = self.chol.solve(v);
        self.a.tr_mul(&y)
    }

    /// Minimum l2-norm solution `A^T (A A^T)^{-1} x`.
    pub fn min_norm(&self, x: &DenseVector) -> Result<DenseVector> {
        self.apply(x)
    }

    /// Orthogonal projection of `s` onto `{s : A s = x}`.
    pub fn project(&self, s: &DenseVector, x: &DenseVector) -> Result<DenseVector> {
        self.check_rows(x.len())?;
        if s.len() != self.a.ncols() {
            return Err(Sl0Error::DimensionMismatch(format!(
                "s has length {}, A has {} columns",
                s.len(),
                self.a.ncols()
            )));
        }
        let mut out = s.as_nalgebra().clone();
        self.project_raw(&mut out, x.as_nalgebra());
        Ok(DenseVector::from_nalgebra_unchecked(out))
    }

    pub(crate) fn project_raw(&self, s: &mut DVector<f64>, x: &DVector<f64>) {
        let mut r = &self.a * &*s;
        r -= x;
        self.chol.solve_mut(&mut r);
        s.gemv_tr(-1.0, &self.a, &r, 1.0);
    }

    /// Column-wise projection of an `m x T` block onto `A S = X`.
    pub(crate) fn project_block(&self, s: &mut DMatrix<f64>, x: &DMatrix<f64>) {
        let mut r = &self.a * &*s;
        r -= x;
        self.chol.solve_mut(&mut r);
        s.gemm_tr(-1.0, &self.a, &r, 1.0);
    }

    pub(crate) fn residual_norm(&self, s: &DVector<f64>, x: &DVector<f64>) -> f64 {
        (&self.a * s - x).norm()
    }

    /// Frobenius norm of `A^T (A A^T)^{-1}`, i.e. `sqrt(trace((A A^T)^{-1}))`.
    pub fn pinv_frobenius_norm(&self) -> f64 {
        let n = self.a.nrows();
        let inv = self.chol.solve(&DMatrix::identity(n, n));
        inv.trace().max(0.0).sqrt()
    }

    fn check_rows(&self, len: usize) -> Result<()> {
        if len != self.a.nrows() {
            return Err(Sl0Error::DimensionMismatch(format!(
                "vector of length {len}, A has {} rows",
                self.a.nrows()
            )));
        }
        Ok(())
    }
}

/// Ratio of power-iteration and inverse-iteration Rayleigh quotients of the
/// SPD matrix `gram`. Underestimates the true condition number slightly.
fn estimate_condition(gram: &DMatrix<f64>, chol: &Cholesky<f64, Dyn>) -> f64 {
    const ITERATIONS: usize = 40;
    let n = gram.nrows();
    // Deterministic start with no special alignment to any eigenvector.
    let start = DVector::from_fn(n, |i, _| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_75).fract());

    let mut v = start.normalize();
    let mut lambda_max = 0.0;
    for _ in 0..ITERATIONS {
        let w = gram * &v;
        lambda_max = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return f64::INFINITY;
        }
        v = w / norm;
    }

    let mut v = start.normalize();
    let mut inv_lambda_min = 0.0;
    for _ in 0..ITERATIONS {
        let w = chol.solve(&v);
        inv_lambda_min = v.dot(&w);
        let norm = w.norm();
        if !norm.is_finite() {
            return f64::INFINITY;
        }
        v = w / norm;
    }
    let cond = lambda_max * inv_lambda_min;
    if cond.is_finite() && cond > 0.0 {
        cond
    } else {
        f64::INFINITY
    }
}

/// Minimum l2-norm solution of `A s = x`.
pub fn min_norm_solution(a: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    ProjectorFactor::new(a)?.min_norm(x)
}

/// `s - A^T (A A^T)^{-1} (A s - x)`.
pub fn project_feasible(
    p: &ProjectorFactor,
    s: &DenseVector,
    x: &DenseVector,
) -> Result<DenseVector> {
    p.project(s, x)
}
