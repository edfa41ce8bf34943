//! Reference implementations shared by the integration tests. They avoid the
//! library's own factorizations so that agreement means something.
#![allow(dead_code)]

pub mod checks;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sl0::linalg::{DenseMatrix, DenseVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7e57)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, m, |_, _| rng.sample(StandardNormal))
}

pub fn unit_columns(mut a: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    a
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

pub fn dense(a: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_nalgebra(a.clone()).unwrap()
}

pub fn dvec(v: &DVector<f64>) -> DenseVector {
    DenseVector::from_nalgebra(v.clone()).unwrap()
}

pub fn select_columns(a: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])])
}

/// `A^T (A A^T)^{-1} x` through an explicit inverse.
pub fn min_norm_by_inverse(a: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let gram_inv = (a * a.transpose()).try_inverse().unwrap();
    a.transpose() * (gram_inv * x)
}

/// `s - A^T (A A^T)^{-1} (A s - x)` through an explicit inverse.
pub fn project_by_inverse(a: &DMatrix<f64>, s: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let gram_inv = (a * a.transpose()).try_inverse().unwrap();
    s - a.transpose() * (gram_inv * (a * s - x))
}

/// Orthonormal basis of `null(A)` from the full SVD of `A^T A`.
pub fn null_space_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.ncols();
    let eig = (a.transpose() * a).symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()));
    let dim = m - a.nrows();
    DMatrix::from_fn(m, dim, |i, j| eig.eigenvectors[(i, order[j])])
}

/// Sparsest `s` with `A s = x`, found by trying every support in order of
/// size and solving the normal equations on it.
pub fn sparsest_by_enumeration(a: &DMatrix<f64>, x: &DVector<f64>, tol: f64) -> DVector<f64> {
    let (n, m) = a.shape();
    if x.norm() <= tol {
        return DVector::zeros(m);
    }
    for size in 1..=n {
        for support in (0..m).combinations(size) {
            let sub = select_columns(a, &support);
            let gram = sub.transpose() * &sub;
            let Some(gram_inv) = gram.try_inverse() else { continue };
            let coef = gram_inv * (sub.transpose() * x);
            if (&sub * &coef - x).norm() <= tol {
                let mut s = DVector::zeros(m);
                for (c, &j) in coef.iter().zip(&support) {
                    s[j] = *c;
                }
                return s;
            }
        }
    }
    panic!("no support of size <= n reproduces x");
}

/// Every `n x n` column submatrix has `|det| > tol` once columns are unit norm.
pub fn urp_by_determinants(a: &DMatrix<f64>, tol: f64) -> bool {
    let a = unit_columns(a.clone());
    (0..a.ncols())
        .combinations(a.nrows())
        .all(|cols| select_columns(&a, &cols).determinant().abs() > tol)
}

/// Largest Frobenius norm of `(B^T B)^{-1} B^T` over column subsets `B`
/// with at most `n` columns.
pub fn m_constant_by_enumeration(a: &DMatrix<f64>) -> f64 {
    let (n, m) = a.shape();
    let mut best = 0.0_f64;
    for size in 1..=n {
        for cols in (0..m).combinations(size) {
            let b = select_columns(a, &cols);
            let left_inv = (b.transpose() * &b).try_inverse().unwrap() * b.transpose();
            best = best.max(left_inv.norm());
        }
    }
    best
}
