use crate::error::{Result, Sl0Error};
use crate::linalg::{compute_m, DenseMatrix, DenseVector, ProjectorFactor};

/// A-posteriori error bound for an estimate `s_hat` with `A s_hat = x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    /// Magnitude of the `(floor(n/2) + 1)`-th largest entry of `s_hat`.
    pub alpha: f64,
    pub m_const: f64,
    /// `(M + 1) m alpha`
    pub bound: f64,
}

/// Bounds `||s_hat - s0||` for any `s0` with at most `n/2` nonzeros solving
/// the same system. Requires the exhaustive computation of `M`, so it is
/// limited to small matrices.
pub fn error_upper_bound(a: &DenseMatrix, s_hat: &DenseVector) -> Result<ErrorBound> {
    let (n, m) = (a.rows(), a.cols());
    if s_hat.len() != m {
        return Err(Sl0Error::DimensionMismatch(format!(
            "estimate has length {}, A has {m} columns",
            s_hat.len()
        )));
    }
    let m_const = compute_m(a)?;
    let mut mags: Vec<f64> = s_hat.as_slice().iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let alpha = mags[n / 2];
    Ok(ErrorBound {
        alpha,
        m_const,
        bound: (m_const + 1.0) * m as f64 * alpha,
    })
}

/// `(M + 1) m sigma sqrt(2 ln m)`: error bound for the Gaussian family once
/// `F_sigma(s_hat) >= m - (n - k)`.
pub fn gaussian_error_bound(m_const: f64, m: usize, sigma: f64) -> f64 {
    let m = m as f64;
    (m_const + 1.0) * m * sigma * (2.0 * m.ln()).sqrt()
}

/// `m gamma epsilon ||A^T (A A^T)^{-1}|| / (n - 2k)` with the pseudoinverse
/// norm supplied by the caller.
pub fn sigma_floor_from_norm(
    m: usize,
    n: usize,
    k: usize,
    epsilon: f64,
    gamma: f64,
    pinv_norm: f64,
) -> Result<f64> {
    if 2 * k >= n {
        return Err(Sl0Error::TooManyActive { k, n });
    }
    if !(epsilon >= 0.0 && gamma > 0.0 && pinv_norm >= 0.0) {
        return Err(Sl0Error::InvalidConfig(format!(
            "need epsilon >= 0, gamma > 0, norm >= 0 (got {epsilon}, {gamma}, {pinv_norm})"
        )));
    }
    Ok(m as f64 * gamma * epsilon * pinv_norm / (n - 2 * k) as f64)
}

/// Smallest sigma worth annealing to when `||A s0 - x|| < epsilon`; the
/// pseudoinverse norm is the Frobenius norm of `A^T (A A^T)^{-1}`.
pub fn suggest_sigma_floor_noisy(
    a: &DenseMatrix,
    k: usize,
    epsilon: f64,
    gamma: f64,
) -> Result<f64> {
    let (n, m) = (a.rows(), a.cols());
    if 2 * k >= n {
        return Err(Sl0Error::TooManyActive { k, n });
    }
    let norm = ProjectorFactor::new(a)?.pinv_frobenius_norm();
    sigma_floor_from_norm(m, n, k, epsilon, gamma, norm)
}
