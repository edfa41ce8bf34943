//! Smooth approximations `f_sigma` of the Kronecker delta.
//!
//! `m - F_sigma(s)` with `F_sigma(s) = sum_i f_sigma(s_i)` approximates the
//! number of nonzeros of `s`, with equality in the limit `sigma -> 0`. The
//! solver climbs `F_sigma` along `delta = -sigma^2 grad F_sigma`, which keeps
//! the step scale-free across the annealing schedule.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Result, Sl0Error};
use crate::linalg::DenseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PenaltyFamily {
    /// `exp(-s^2 / 2 sigma^2)`
    #[default]
    Gaussian,
    /// `1 - |s| / sigma` on `|s| < sigma`, zero outside.
    Triangular,
    /// `1 - (s / sigma)^2` on `|s| <= sigma`, zero outside.
    TruncatedHyperbolic,
    /// `sigma^2 / (s^2 + sigma^2)`
    Rational,
}

impl PenaltyFamily {
    pub const ALL: [PenaltyFamily; 4] = [
        PenaltyFamily::Gaussian,
        PenaltyFamily::Triangular,
        PenaltyFamily::TruncatedHyperbolic,
        PenaltyFamily::Rational,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PenaltyFamily::Gaussian => "gaussian",
            PenaltyFamily::Triangular => "triangular",
            PenaltyFamily::TruncatedHyperbolic => "hyperbolic",
            PenaltyFamily::Rational => "rational",
        }
    }

    /// Whether `f_sigma` is differentiable everywhere.
    pub fn is_smooth(self) -> bool {
        matches!(self, PenaltyFamily::Gaussian | PenaltyFamily::Rational)
    }

    /// `-f''(0) / 2` of the unit-scale profile, for the smooth families.
    pub fn curvature_at_zero(self) -> Option<f64> {
        match self {
            PenaltyFamily::Gaussian => Some(0.5),
            PenaltyFamily::Rational => Some(1.0),
            _ => None,
        }
    }

    /// Smallest `gamma` with `|d f_sigma / ds| <= gamma / sigma` everywhere.
    ///
    /// This is the constant used by [`crate::solver::suggest_sigma_floor_noisy`].
    pub fn slope_bound(self) -> f64 {
        match self {
            PenaltyFamily::Gaussian => (-0.5f64).exp(),
            // attained at s = sigma / sqrt(3)
            PenaltyFamily::Rational => 3.0 * 3f64.sqrt() / 8.0,
            PenaltyFamily::Triangular => 1.0,
            PenaltyFamily::TruncatedHyperbolic => 2.0,
        }
    }

    /// `f_sigma(s)` without the sigma check.
    #[inline]
    pub(crate) fn value(self, s: f64, sigma: f64) -> f64 {
        let u = s / sigma;
        match self {
            PenaltyFamily::Gaussian => (-0.5 * u * u).exp(),
            PenaltyFamily::Triangular => {
                if u.abs() < 1.0 {
                    1.0 - u.abs()
                } else {
                    0.0
                }
            }
            PenaltyFamily::TruncatedHyperbolic => {
                if u.abs() <= 1.0 {
                    1.0 - u * u
                } else {
                    0.0
                }
            }
            PenaltyFamily::Rational => 1.0 / (1.0 + u * u),
        }
    }

    /// `-sigma^2 f_sigma'(s)`, with the derivative taken as zero at kinks.
    #[inline]
    pub(crate) fn scaled_ascent(self, s: f64, sigma: f64) -> f64 {
        let u = s / sigma;
        match self {
            PenaltyFamily::Gaussian => s * (-0.5 * u * u).exp(),
            PenaltyFamily::Triangular => {
                if s != 0.0 && u.abs() < 1.0 {
                    sigma * s.signum()
                } else {
                    0.0
                }
            }
            PenaltyFamily::TruncatedHyperbolic => {
                if u.abs() < 1.0 {
                    2.0 * s
                } else {
                    0.0
                }
            }
            PenaltyFamily::Rational => {
                let d = 1.0 + u * u;
                2.0 * s / (d * d)
            }
        }
    }

    pub(crate) fn sum_raw(self, s: &DVector<f64>, sigma: f64) -> f64 {
        s.iter().map(|&v| self.value(v, sigma)).sum()
    }
}

impl fmt::Display for PenaltyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PenaltyFamily {
    type Err = Sl0Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(PenaltyFamily::Gaussian),
            "triangular" => Ok(PenaltyFamily::Triangular),
            "hyperbolic" | "truncated_hyperbolic" => Ok(PenaltyFamily::TruncatedHyperbolic),
            "rational" => Ok(PenaltyFamily::Rational),
            other => Err(Sl0Error::InvalidConfig(format!(
                "unknown penalty family {other:?}"
            ))),
        }
    }
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Sl0Error::NonPositiveSigma(sigma))
    }
}

/// `f_sigma(s)`, a value in `[0, 1]`.
pub fn eval_f(family: PenaltyFamily, s: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(family.value(s, sigma))
}

/// `F_sigma(s) = sum_i f_sigma(s_i)`, a value in `[0, m]`.
pub fn eval_big_f(family: PenaltyFamily, s: &DenseVector, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(family.sum_raw(s.as_nalgebra(), sigma))
}

/// `delta = -sigma^2 grad F_sigma(s)`; for the Gaussian family
/// `delta_i = s_i exp(-s_i^2 / 2 sigma^2)`.
pub fn ascent_direction(family: PenaltyFamily, s: &DenseVector, sigma: f64) -> Result<DenseVector> {
    check_sigma(sigma)?;
    Ok(DenseVector::from_nalgebra_unchecked(
        s.as_nalgebra().map(|v| family.scaled_ascent(v, sigma)),
    ))
}
