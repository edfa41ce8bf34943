use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{rng, stream};
use crate::error::{Result, Sl0Error};
use crate::linalg::{DenseMatrix, DenseVector};

/// How many sources are active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activity {
    /// Each entry independently active with this probability.
    Probability(f64),
    /// A uniformly random subset of exactly this many entries.
    ExactK(usize),
}

/// Bernoulli-Gaussian sources: active entries `N(0, sigma_on^2)`, inactive
/// entries `N(0, sigma_off^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    pub m: usize,
    pub activity: Activity,
    pub sigma_on: f64,
    pub sigma_off: f64,
}

impl SourceModel {
    /// `p = k / m`, the parameterisation used throughout the experiments.
    pub fn with_mean_active(m: usize, k: f64, sigma_on: f64, sigma_off: f64) -> Self {
        Self {
            m,
            activity: Activity::Probability(k / m as f64),
            sigma_on,
            sigma_off,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Sl0Error::Empty);
        }
        match self.activity {
            Activity::Probability(p) if !(0.0..=1.0).contains(&p) => {
                return Err(Sl0Error::InvalidConfig(format!(
                    "activity probability {p} outside [0, 1]"
                )))
            }
            Activity::ExactK(k) if k > self.m => {
                return Err(Sl0Error::InvalidConfig(format!(
                    "exact_k = {k} exceeds m = {}",
                    self.m
                )))
            }
            _ => {}
        }
        if !(self.sigma_on > 0.0 && self.sigma_on.is_finite()) {
            return Err(Sl0Error::InvalidConfig(format!(
                "sigma_on must be positive, got {}",
                self.sigma_on
            )));
        }
        if !(self.sigma_off >= 0.0 && self.sigma_off <= self.sigma_on) {
            return Err(Sl0Error::InvalidConfig(format!(
                "need 0 <= sigma_off <= sigma_on, got {} and {}",
                self.sigma_off, self.sigma_on
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingSpec {
    pub n: usize,
    pub m: usize,
    /// Per-component standard deviation of the additive sensor noise.
    pub noise_sigma: f64,
    pub seed: u64,
}

pub fn generate_sources(model: &SourceModel, seed: u64) -> Result<DenseVector> {
    model.validate()?;
    let mut rng = rng(seed, stream::SOURCES);
    let m = model.m;
    let active: Vec<bool> = match model.activity {
        Activity::Probability(p) => (0..m).map(|_| rng.random_bool(p)).collect(),
        Activity::ExactK(k) => {
            let mut mask = vec![false; m];
            for i in index::sample(&mut rng, m, k) {
                mask[i] = true;
            }
            mask
        }
    };
    let data = active
        .into_iter()
        .map(|on| {
            let scale = if on { model.sigma_on } else { model.sigma_off };
            let z: f64 = rng.sample(StandardNormal);
            scale * z
        })
        .collect();
    DenseVector::from_vec(data)
}

/// `n x m` matrix of standard normal entries with every column scaled to
/// unit norm.
pub fn generate_mixing(spec: &MixingSpec) -> Result<DenseMatrix> {
    if spec.n == 0 || spec.m == 0 {
        return Err(Sl0Error::Empty);
    }
    if spec.n > spec.m {
        return Err(Sl0Error::NotUnderdetermined {
            rows: spec.n,
            cols: spec.m,
        });
    }
    let mut rng = rng(spec.seed, stream::MIXING);
    // Column-major fill: entries of column 0 first.
    let mut a = DMatrix::from_fn(spec.n, spec.m, |_, _| 0.0);
    for mut col in a.column_iter_mut() {
        for v in col.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = col.norm();
        col /= norm;
    }
    DenseMatrix::from_nalgebra(a)
}

/// `x = A s + noise`, noise i.i.d. `N(0, noise_sigma^2)` per component.
pub fn mix(a: &DenseMatrix, s: &DenseVector, noise_sigma: f64, seed: u64) -> Result<DenseVector> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Sl0Error::InvalidConfig(format!(
            "noise sigma must be non-negative, got {noise_sigma}"
        )));
    }
    let clean = a.mul_vec(s)?;
    if noise_sigma == 0.0 {
        return Ok(clean);
    }
    let mut rng = rng(seed, stream::NOISE);
    let noise = DVector::from_fn(a.rows(), |_, _| {
        let z: f64 = rng.sample(StandardNormal);
        noise_sigma * z
    });
    DenseVector::from_nalgebra(clean.into_nalgebra() + noise)
}

/// Everything needed to draw one `(A, s, x)` instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub n: usize,
    pub sources: SourceModel,
    pub noise_sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub a: DenseMatrix,
    pub s: DenseVector,
    pub x: DenseVector,
}

/// Draws matrix, sources and noise from the three streams of `seed`.
pub fn generate_problem(spec: &ProblemSpec, seed: u64) -> Result<Problem> {
    let a = generate_mixing(&MixingSpec {
        n: spec.n,
        m: spec.sources.m,
        noise_sigma: spec.noise_sigma,
        seed,
    })?;
    let s = generate_sources(&spec.sources, seed)?;
    let x = mix(&a, &s, spec.noise_sigma, seed)?;
    Ok(Problem { a, s, x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_k_has_exactly_k_nonzeros() {
        let model = SourceModel {
            m: 100,
            activity: Activity::ExactK(5),
            sigma_on: 1.0,
            sigma_off: 0.0,
        };
        for seed in 0..20 {
            let s = generate_sources(&model, seed).unwrap();
            assert_eq!(s.as_slice().iter().filter(|v| **v != 0.0).count(), 5);
        }
    }

    #[test]
    fn all_active_has_sigma_on_variance() {
        let model = SourceModel {
            m: 100_000,
            activity: Activity::Probability(1.0),
            sigma_on: 2.0,
            sigma_off: 0.0,
        };
        let s = generate_sources(&model, 11).unwrap();
        let var = s.as_slice().iter().map(|v| v * v).sum::<f64>() / model.m as f64;
        assert!((var - 4.0).abs() < 0.4, "{var}");
    }

    #[test]
    fn invalid_models() {
        let base = SourceModel {
            m: 10,
            activity: Activity::Probability(0.1),
            sigma_on: 1.0,
            sigma_off: 0.0,
        };
        for bad in [
            SourceModel { activity: Activity::Probability(1.5), ..base },
            SourceModel { activity: Activity::ExactK(11), ..base },
            SourceModel { sigma_off: 2.0, ..base },
            SourceModel { sigma_on: 0.0, ..base },
        ] {
            assert!(generate_sources(&bad, 0).is_err());
        }
    }

    #[test]
    fn mixing_columns_are_unit_norm_and_seeded() {
        let spec = MixingSpec { n: 7, m: 30, noise_sigma: 0.0, seed: 99 };
        let a = generate_mixing(&spec).unwrap();
        for j in 0..30 {
            assert!((a.column(j).norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(a, generate_mixing(&spec).unwrap());
        assert_ne!(a, generate_mixing(&MixingSpec { seed: 100, ..spec }).unwrap());
    }

    #[test]
    fn noiseless_mix_is_exact_product() {
        let a = generate_mixing(&MixingSpec { n: 3, m: 5, noise_sigma: 0.0, seed: 1 }).unwrap();
        let s = DenseVector::from_vec(vec![1.0, 0.0, -2.0, 0.0, 0.5]).unwrap();
        assert_eq!(mix(&a, &s, 0.0, 5).unwrap(), a.mul_vec(&s).unwrap());
        assert_eq!(mix(&a, &s, 0.1, 5).unwrap(), mix(&a, &s, 0.1, 5).unwrap());
        assert!(matches!(
            mix(&a, &DenseVector::zeros(4), 0.0, 5),
            Err(Sl0Error::DimensionMismatch(_))
        ));
    }
}
