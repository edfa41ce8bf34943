use crate::error::{Result, Sl0Error};
use crate::linalg::DenseVector;

/// Default annealing sequence, from 1 down to 0.01.
pub const DEFAULT_SIGMAS: [f64; 7] = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01];

/// Strictly decreasing, positive sequence `sigma_1 > ... > sigma_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSchedule(Vec<f64>);

impl SigmaSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Sl0Error::InvalidConfig("sigma schedule is empty".into()));
        }
        if let Some(&bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Sl0Error::NonPositiveSigma(bad));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Sl0Error::InvalidConfig(
                "sigma schedule must be strictly decreasing".into(),
            ));
        }
        Ok(Self(values))
    }

    /// `sigma_1, c sigma_1, c^2 sigma_1, ...` while above `sigma_min`, then
    /// `sigma_min` itself.
    pub fn geometric(sigma1: f64, c: f64, sigma_min: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Sl0Error::InvalidConfig(format!(
                "decay factor c must lie in (0, 1), got {c}"
            )));
        }
        for sigma in [sigma1, sigma_min] {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Sl0Error::NonPositiveSigma(sigma));
            }
        }
        let mut values = vec![sigma1];
        let mut last = sigma1;
        while last * c > sigma_min {
            last *= c;
            values.push(last);
        }
        if last > sigma_min {
            values.push(sigma_min);
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.0.last().expect("schedule is never empty")
    }
}

impl Default for SigmaSchedule {
    fn default() -> Self {
        Self(DEFAULT_SIGMAS.to_vec())
    }
}

/// Starting sigma for a geometric schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma1 {
    /// Twice the largest magnitude in the minimum-norm solution.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    Explicit(SigmaSchedule),
    Geometric { sigma1: Sigma1, c: f64, sigma_min: f64 },
}

impl ScheduleSpec {
    /// Whether the schedule can be built without looking at the data.
    pub fn is_data_independent(&self) -> bool {
        !matches!(
            self,
            ScheduleSpec::Geometric {
                sigma1: Sigma1::Auto,
                ..
            }
        )
    }

    /// Builds the concrete schedule; `s0` is the minimum-norm solution.
    pub fn resolve(&self, s0: &DenseVector) -> Result<SigmaSchedule> {
        match *self {
            ScheduleSpec::Explicit(ref s) => Ok(s.clone()),
            ScheduleSpec::Geometric { sigma1, c, sigma_min } => {
                let sigma1 = match sigma1 {
                    Sigma1::Auto => auto_sigma1(s0)?,
                    Sigma1::Fixed(v) => v,
                };
                SigmaSchedule::geometric(sigma1, c, sigma_min)
            }
        }
    }
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec::Explicit(SigmaSchedule::default())
    }
}

/// `2 max_i |s0_i|`: large enough that every `f_sigma(s0_i)` is close to one.
pub fn auto_sigma1(s0: &DenseVector) -> Result<f64> {
    let max = s0.max_abs();
    if max == 0.0 {
        return Err(Sl0Error::ZeroVector);
    }
    Ok(2.0 * max)
}
