use crate::error::{Result, Sl0Error};
use crate::linalg::DenseVector;

/// Reported SNR for exact recovery, keeping averages finite.
pub const SNR_CAP_DB: f64 = 300.0;

fn check_lengths(s_true: &DenseVector, s_est: &DenseVector) -> Result<()> {
    if s_true.len() != s_est.len() {
        return Err(Sl0Error::DimensionMismatch(format!(
            "reference has length {}, estimate {}",
            s_true.len(),
            s_est.len()
        )));
    }
    Ok(())
}

fn error_norm(s_true: &DenseVector, s_est: &DenseVector) -> f64 {
    (s_true.as_nalgebra() - s_est.as_nalgebra()).norm()
}

/// `20 log10(||s|| / ||s - s_est||)`, capped at [`SNR_CAP_DB`].
pub fn snr_db(s_true: &DenseVector, s_est: &DenseVector) -> Result<f64> {
    check_lengths(s_true, s_est)?;
    let signal = s_true.norm();
    if signal == 0.0 {
        return Err(Sl0Error::ZeroReference);
    }
    let err = error_norm(s_true, s_est);
    if err == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((20.0 * (signal / err).log10()).min(SNR_CAP_DB))
}

/// `||s - s_est||^2 / m`.
pub fn mse(s_true: &DenseVector, s_est: &DenseVector) -> Result<f64> {
    check_lengths(s_true, s_est)?;
    let err = error_norm(s_true, s_est);
    Ok(err * err / s_true.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub snr_db: f64,
    pub mse: f64,
    /// Solver wall time in seconds.
    pub wall_time: f64,
    pub run_index: usize,
}
