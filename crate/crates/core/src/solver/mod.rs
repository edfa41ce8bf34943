//! Smoothed-l0 recovery of sparse solutions of `A s = x`.
//!
//! Starting from the minimum-norm solution, each level of a decreasing
//! sigma schedule runs a few steps of `s <- s - mu * delta(s)` each followed
//! by projection back onto `{s : A s = x}`, warm-starting from the previous
//! level. With `delta = -sigma^2 grad F_sigma` the effective step `mu sigma^2`
//! shrinks together with sigma.

mod bounds;
mod irls;
mod report;
mod schedule;

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Result, Sl0Error};
use crate::linalg::{DenseMatrix, DenseVector, ProjectorFactor};
use crate::penalty::{check_sigma, PenaltyFamily};

pub use bounds::{
    error_upper_bound, gaussian_error_bound, sigma_floor_from_norm, suggest_sigma_floor_noisy,
    ErrorBound,
};
pub use irls::{irls_solve, IrlsConfig};
pub use report::{LevelRecord, SolveReport};
pub use schedule::{auto_sigma1, ScheduleSpec, Sigma1, SigmaSchedule, DEFAULT_SIGMAS};

pub const DEFAULT_MU: f64 = 2.5;
pub const DEFAULT_INNER_ITERS: usize = 3;
pub const DEFAULT_MAX_INNER: usize = 1000;

/// How the inner ascent loop at a fixed sigma terminates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Exactly `inner_iters` steps per level.
    FixedL,
    /// Step until `F_sigma(s) >= target_f` (default `m - n/2`), failing with
    /// [`Sl0Error::ThresholdUnreachable`] after `max_inner` steps.
    ThresholdF {
        target_f: Option<f64>,
        max_inner: usize,
    },
}

impl Termination {
    pub fn threshold() -> Self {
        Termination::ThresholdF {
            target_f: None,
            max_inner: DEFAULT_MAX_INNER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub schedule: ScheduleSpec,
    pub mu: f64,
    pub inner_iters: usize,
    pub family: PenaltyFamily,
    pub mode: Termination,
    /// Keep the estimate at the end of every sigma level in the report.
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            schedule: ScheduleSpec::default(),
            mu: DEFAULT_MU,
            inner_iters: DEFAULT_INNER_ITERS,
            family: PenaltyFamily::Gaussian,
            mode: Termination::FixedL,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn with_schedule(mut self, schedule: ScheduleSpec) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Sl0Error::InvalidConfig(format!("mu must be positive, got {}", self.mu)));
        }
        if self.inner_iters == 0 {
            return Err(Sl0Error::InvalidConfig("L must be at least 1".into()));
        }
        if let Termination::ThresholdF { max_inner, target_f } = self.mode {
            if max_inner == 0 {
                return Err(Sl0Error::InvalidConfig("max_inner must be at least 1".into()));
            }
            if target_f.is_some_and(|t| !t.is_finite()) {
                return Err(Sl0Error::InvalidConfig("target_F must be finite".into()));
            }
        }
        match self.schedule {
            ScheduleSpec::Geometric { sigma1, c, sigma_min } => {
                // Build a throwaway schedule just to run the checks.
                let probe = match sigma1 {
                    Sigma1::Auto => 1.0_f64.max(2.0 * sigma_min),
                    Sigma1::Fixed(v) => v,
                };
                SigmaSchedule::geometric(probe, c, sigma_min).map(drop)
            }
            ScheduleSpec::Explicit(_) => Ok(()),
        }
    }

    fn target_f(&self, n: usize, m: usize) -> f64 {
        match self.mode {
            Termination::ThresholdF {
                target_f: Some(t), ..
            } => t,
            _ => m as f64 - n as f64 / 2.0,
        }
    }
}

/// One projected ascent step `s <- P(s - mu delta(s))` in place.
#[inline]
fn ascent_step(
    factor: &ProjectorFactor,
    s: &mut DVector<f64>,
    x: &DVector<f64>,
    family: PenaltyFamily,
    sigma: f64,
    mu: f64,
) {
    s.apply(|v| *v -= mu * family.scaled_ascent(*v, sigma));
    factor.project_raw(s, x);
}

/// Runs `iterations` projected ascent steps at a fixed sigma, starting from
/// `start` (which should already be feasible).
pub fn maximize_at_sigma(
    factor: &ProjectorFactor,
    start: &DenseVector,
    x: &DenseVector,
    family: PenaltyFamily,
    sigma: f64,
    mu: f64,
    iterations: usize,
) -> Result<DenseVector> {
    check_sigma(sigma)?;
    let (n, m) = factor.dims();
    if start.len() != m || x.len() != n {
        return Err(Sl0Error::DimensionMismatch(format!(
            "start length {} / x length {} for a {n}x{m} system",
            start.len(),
            x.len()
        )));
    }
    let mut s = start.as_nalgebra().clone();
    for _ in 0..iterations {
        ascent_step(factor, &mut s, x.as_nalgebra(), family, sigma, mu);
    }
    DenseVector::from_nalgebra(s)
}

/// Recovers a sparse solution of `A s = x`.
pub fn sl0_solve(a: &DenseMatrix, x: &DenseVector, cfg: &SolverConfig) -> Result<SolveReport> {
    let factor = ProjectorFactor::new(a)?;
    sl0_solve_with_factor(&factor, x, cfg)
}

/// As [`sl0_solve`], reusing a factor of `A A^T`.
pub fn sl0_solve_with_factor(
    factor: &ProjectorFactor,
    x: &DenseVector,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let started = Instant::now();
    let (n, m) = factor.dims();
    if x.len() != n {
        return Err(Sl0Error::DimensionMismatch(format!(
            "x has length {}, A has {n} rows",
            x.len()
        )));
    }
    let xv = x.as_nalgebra();
    if xv.iter().all(|v| *v == 0.0) {
        return Ok(zero_report(cfg, m, started.elapsed()));
    }

    let mut s = factor.apply_raw(xv);
    let schedule = cfg
        .schedule
        .resolve(&DenseVector::from_nalgebra_unchecked(s.clone()))?;
    let target = cfg.target_f(n, m);
    let family = cfg.family;

    let mut trace = Vec::with_capacity(schedule.len());
    let mut iterates = Vec::new();
    for &sigma in schedule.values() {
        let inner = match cfg.mode {
            Termination::FixedL => {
                for _ in 0..cfg.inner_iters {
                    ascent_step(factor, &mut s, xv, family, sigma, cfg.mu);
                }
                cfg.inner_iters
            }
            Termination::ThresholdF { max_inner, .. } => {
                let mut done = 0;
                loop {
                    ascent_step(factor, &mut s, xv, family, sigma, cfg.mu);
                    done += 1;
                    let reached = family.sum_raw(&s, sigma);
                    if reached >= target {
                        break done;
                    }
                    if done >= max_inner {
                        return Err(Sl0Error::ThresholdUnreachable {
                            sigma,
                            reached,
                            target,
                            iterations: done,
                        });
                    }
                }
            }
        };
        trace.push(LevelRecord {
            sigma,
            f_sigma: family.sum_raw(&s, sigma),
            residual_norm: factor.residual_norm(&s, xv),
            inner_iterations: inner,
        });
        if cfg.record_iterates {
            iterates.push(DenseVector::from_nalgebra(s.clone())?);
        }
    }
    Ok(SolveReport {
        estimate: DenseVector::from_nalgebra(s)?,
        trace,
        iterates,
        wall_time: started.elapsed(),
    })
}

fn zero_report(cfg: &SolverConfig, m: usize, elapsed: Duration) -> SolveReport {
    // With x = 0 the minimum-norm start and every iterate are zero.
    let trace = match &cfg.schedule {
        ScheduleSpec::Explicit(s) => s
            .values()
            .iter()
            .map(|&sigma| LevelRecord {
                sigma,
                f_sigma: m as f64,
                residual_norm: 0.0,
                inner_iterations: 0,
            })
            .collect(),
        _ => Vec::new(),
    };
    let iterates = if cfg.record_iterates {
        vec![DenseVector::zeros(m); trace.len()]
    } else {
        Vec::new()
    };
    SolveReport {
        estimate: DenseVector::zeros(m),
        trace,
        iterates,
        wall_time: elapsed,
    }
}

/// Solves `A S = X` column by column with one shared factor of `A A^T`.
///
/// With [`Termination::FixedL`] and a data-independent schedule all columns
/// are advanced together in matrix form; otherwise columns are solved
/// independently (in parallel). Reports are in column order either way.
pub fn sl0_solve_batch(
    a: &DenseMatrix,
    x: &DenseMatrix,
    cfg: &SolverConfig,
) -> Result<Vec<SolveReport>> {
    let factor = ProjectorFactor::new(a)?;
    sl0_solve_batch_with_factor(&factor, x, cfg)
}

pub fn sl0_solve_batch_with_factor(
    factor: &ProjectorFactor,
    x: &DenseMatrix,
    cfg: &SolverConfig,
) -> Result<Vec<SolveReport>> {
    cfg.validate()?;
    let (n, m) = factor.dims();
    if x.rows() != n {
        return Err(Sl0Error::DimensionMismatch(format!(
            "X has {} rows, A has {n}",
            x.rows()
        )));
    }
    if cfg.mode != Termination::FixedL || !cfg.schedule.is_data_independent() {
        return (0..x.cols())
            .into_par_iter()
            .map(|t| sl0_solve_with_factor(factor, &x.column(t), cfg))
            .collect();
    }

    let started = Instant::now();
    let schedule = cfg.schedule.resolve(&DenseVector::zeros(m))?;
    let xm = x.as_nalgebra();
    let cols = xm.ncols();
    let family = cfg.family;

    let mut s = DMatrix::zeros(m, cols);
    factor.project_block(&mut s, xm);

    let mut traces: Vec<Vec<LevelRecord>> = vec![Vec::with_capacity(schedule.len()); cols];
    let mut iterates: Vec<Vec<DenseVector>> = vec![Vec::new(); cols];
    for &sigma in schedule.values() {
        for _ in 0..cfg.inner_iters {
            s.apply(|v| *v -= cfg.mu * family.scaled_ascent(*v, sigma));
            factor.project_block(&mut s, xm);
        }
        let residuals = factor.matrix() * &s - xm;
        for t in 0..cols {
            let col = s.column(t);
            traces[t].push(LevelRecord {
                sigma,
                f_sigma: col.iter().map(|&v| family.value(v, sigma)).sum(),
                residual_norm: residuals.column(t).norm(),
                inner_iterations: cfg.inner_iters,
            });
            if cfg.record_iterates {
                iterates[t].push(DenseVector::from_nalgebra(col.into_owned())?);
            }
        }
    }

    let per_column = started.elapsed() / cols.max(1) as u32;
    let mut reports = Vec::with_capacity(cols);
    for (t, (trace, iterates)) in traces.into_iter().zip(iterates).enumerate() {
        if xm.column(t).iter().all(|v| *v == 0.0) {
            reports.push(zero_report(cfg, m, per_column));
            continue;
        }
        reports.push(SolveReport {
            estimate: DenseVector::from_nalgebra(s.column(t).into_owned())?,
            trace,
            iterates,
            wall_time: per_column,
        });
    }
    Ok(reports)
}
