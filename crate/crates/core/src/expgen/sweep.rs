use std::fmt::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::metrics::{mse, snr_db, TrialResult};
use super::source::{generate_problem, Activity, ProblemSpec, SourceModel};
use crate::error::{Result, Sl0Error};
use crate::penalty::PenaltyFamily;
use crate::solver::{
    irls_solve, sl0_solve, IrlsConfig, ScheduleSpec, Sigma1, SigmaSchedule, SolverConfig,
    DEFAULT_INNER_ITERS, DEFAULT_MU,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Sl0,
    Irls,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Sl0 => "sl0",
            SolverKind::Irls => "irls",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Sl0Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl0" => Ok(SolverKind::Sl0),
            "irls" | "focuss" => Ok(SolverKind::Irls),
            other => Err(Sl0Error::InvalidConfig(format!("unknown solver {other:?}"))),
        }
    }
}

/// One combination of the swept parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// Geometric decay factor; `None` uses the grid's explicit schedule.
    pub c: Option<f64>,
    pub sigma_min: f64,
    pub inner_iters: usize,
    pub noise_sigma: f64,
    pub family: PenaltyFamily,
    pub solver: SolverKind,
}

/// Cartesian grid of sweep parameters plus the settings shared by every point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub c: Vec<Option<f64>>,
    pub sigma_min: Vec<f64>,
    pub inner_iters: Vec<usize>,
    pub noise_sigma: Vec<f64>,
    pub family: Vec<PenaltyFamily>,
    pub solver: Vec<SolverKind>,

    /// First sigma of geometric schedules.
    pub sigma1: Sigma1,
    /// Used at points where `c` is `None`.
    pub schedule: SigmaSchedule,
    pub mu: f64,
    pub sigma_on: f64,
    pub sigma_off: f64,
    /// Activate exactly `k` sources instead of each with probability `k/m`.
    pub exact_k: bool,
    pub irls: IrlsConfig,
}

impl Default for SweepGrid {
    /// A single point: m = 1000, n = 400, k = 100, noise 0.01, default schedule.
    fn default() -> Self {
        Self {
            m: vec![1000],
            n: vec![400],
            k: vec![100],
            c: vec![None],
            sigma_min: vec![0.01],
            inner_iters: vec![DEFAULT_INNER_ITERS],
            noise_sigma: vec![0.01],
            family: vec![PenaltyFamily::Gaussian],
            solver: vec![SolverKind::Sl0],
            sigma1: Sigma1::Fixed(1.0),
            schedule: SigmaSchedule::default(),
            mu: DEFAULT_MU,
            sigma_on: 1.0,
            sigma_off: 0.0,
            exact_k: false,
            irls: IrlsConfig::default(),
        }
    }
}

impl SweepGrid {
    pub const PARAM_NAMES: [&'static str; 9] = [
        "m",
        "n",
        "k",
        "c",
        "sigma_min",
        "L",
        "noise_sigma",
        "family",
        "solver",
    ];

    /// Grid points with `m` varying slowest and `solver` fastest.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &n in &self.n {
                for &k in &self.k {
                    for &c in &self.c {
                        for &sigma_min in &self.sigma_min {
                            for &inner_iters in &self.inner_iters {
                                for &noise_sigma in &self.noise_sigma {
                                    for &family in &self.family {
                                        for &solver in &self.solver {
                                            out.push(GridPoint {
                                                m,
                                                n,
                                                k,
                                                c,
                                                sigma_min,
                                                inner_iters,
                                                noise_sigma,
                                                family,
                                                solver,
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("m", self.m.len()),
            ("n", self.n.len()),
            ("k", self.k.len()),
            ("c", self.c.len()),
            ("sigma_min", self.sigma_min.len()),
            ("L", self.inner_iters.len()),
            ("noise_sigma", self.noise_sigma.len()),
            ("family", self.family.len()),
            ("solver", self.solver.len()),
        ];
        if let Some((name, _)) = axes.iter().find(|(_, len)| *len == 0) {
            return Err(Sl0Error::InvalidConfig(format!("grid axis {name} is empty")));
        }
        for p in self.points() {
            if p.n > p.m {
                return Err(Sl0Error::NotUnderdetermined { rows: p.n, cols: p.m });
            }
            self.source_model(&p).validate()?;
            self.solver_config(&p).validate()?;
            if !(p.noise_sigma >= 0.0 && p.noise_sigma.is_finite()) {
                return Err(Sl0Error::InvalidConfig(format!(
                    "noise sigma must be non-negative, got {}",
                    p.noise_sigma
                )));
            }
        }
        Ok(())
    }

    pub fn source_model(&self, p: &GridPoint) -> SourceModel {
        let activity = if self.exact_k {
            Activity::ExactK(p.k)
        } else {
            Activity::Probability(p.k as f64 / p.m as f64)
        };
        SourceModel {
            m: p.m,
            activity,
            sigma_on: self.sigma_on,
            sigma_off: self.sigma_off,
        }
    }

    pub fn solver_config(&self, p: &GridPoint) -> SolverConfig {
        let schedule = match p.c {
            Some(c) => ScheduleSpec::Geometric {
                sigma1: self.sigma1,
                c,
                sigma_min: p.sigma_min,
            },
            None => ScheduleSpec::Explicit(self.schedule.clone()),
        };
        SolverConfig {
            schedule,
            mu: self.mu,
            inner_iters: p.inner_iters,
            family: p.family,
            ..SolverConfig::default()
        }
    }
}

/// Generates the instance for `seed` and solves it once.
pub fn run_trial(grid: &SweepGrid, p: &GridPoint, seed: u64, run_index: usize) -> Result<TrialResult> {
    let problem = generate_problem(
        &ProblemSpec {
            n: p.n,
            sources: grid.source_model(p),
            noise_sigma: p.noise_sigma,
        },
        seed,
    )?;
    let started = Instant::now();
    let estimate = match p.solver {
        SolverKind::Sl0 => sl0_solve(&problem.a, &problem.x, &grid.solver_config(p))?.estimate,
        SolverKind::Irls => irls_solve(&problem.a, &problem.x, &grid.irls)?,
    };
    let wall_time = started.elapsed().as_secs_f64();
    Ok(TrialResult {
        snr_db: snr_db(&problem.s, &estimate)?,
        mse: mse(&problem.s, &estimate)?,
        wall_time,
        run_index,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub point_index: usize,
    pub run_index: usize,
    pub seed: u64,
    pub result: std::result::Result<TrialResult, Sl0Error>,
}

/// Aggregated trials of one grid point. Statistics cover successful trials
/// only and are NaN when every trial failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: GridPoint,
    pub runs: usize,
    pub snr_mean_db: f64,
    pub snr_std_db: f64,
    pub snr_min_db: f64,
    pub mse_mean: f64,
    pub time_mean_s: f64,
    pub failures: usize,
    /// Fraction of successful trials with SNR above 20 dB.
    pub frac_above_20db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub trials: Vec<TrialOutcome>,
}

fn param_fields(p: &GridPoint) -> String {
    let c = p.c.map(|c| format!("{c}")).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        p.m,
        p.n,
        p.k,
        c,
        p.sigma_min,
        p.inner_iters,
        p.noise_sigma,
        p.family,
        p.solver.name()
    )
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = SweepGrid::PARAM_NAMES.join(",");
        out.push_str(",runs,snr_mean_db,snr_std_db,snr_min_db,mse_mean,time_mean_s,failures\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                param_fields(&r.point),
                r.runs,
                r.snr_mean_db,
                r.snr_std_db,
                r.snr_min_db,
                r.mse_mean,
                r.time_mean_s,
                r.failures
            )
            .unwrap();
        }
        out
    }

    /// Long format: one row per trial.
    pub fn trials_csv(&self) -> String {
        let mut out = SweepGrid::PARAM_NAMES.join(",");
        out.push_str(",run_index,seed,snr_db,mse,time_s,error\n");
        for t in &self.trials {
            let p = &self.rows[t.point_index].point;
            let tail = match &t.result {
                Ok(r) => format!("{},{},{},", r.snr_db, r.mse, r.wall_time),
                Err(e) => format!(",,,\"{}\"", e.to_string().replace('"', "'")),
            };
            writeln!(out, "{},{},{},{}", param_fields(p), t.run_index, t.seed, tail).unwrap();
        }
        out
    }
}

fn summarize(point: GridPoint, runs: usize, trials: &[TrialOutcome]) -> SweepRow {
    let ok: Vec<&TrialResult> = trials.iter().filter_map(|t| t.result.as_ref().ok()).collect();
    let count = ok.len() as f64;
    let mean = |f: fn(&TrialResult) -> f64| -> f64 {
        if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().map(|t| f(t)).sum::<f64>() / count
        }
    };
    let snr_mean_db = mean(|t| t.snr_db);
    let snr_std_db = if ok.len() < 2 {
        if ok.is_empty() { f64::NAN } else { 0.0 }
    } else {
        (ok.iter().map(|t| (t.snr_db - snr_mean_db).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
    };
    let snr_min_db = ok.iter().map(|t| t.snr_db).fold(f64::NAN, f64::min);
    SweepRow {
        point,
        runs,
        snr_mean_db,
        snr_std_db,
        snr_min_db,
        mse_mean: mean(|t| t.mse),
        time_mean_s: mean(|t| t.wall_time),
        failures: trials.len() - ok.len(),
        frac_above_20db: if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().filter(|t| t.snr_db > 20.0).count() as f64 / count
        },
    }
}

/// Runs `runs` trials at every grid point. Trial `r` uses seed
/// `base_seed + r` at every point, so points are compared on the same draws.
///
/// `jobs` caps the worker threads (`0` lets rayon decide). Trial failures are
/// recorded in the table, not returned as errors.
pub fn run_sweep(grid: &SweepGrid, runs: usize, base_seed: u64, jobs: usize) -> Result<SweepTable> {
    grid.validate()?;
    if runs == 0 {
        return Err(Sl0Error::InvalidConfig("runs must be at least 1".into()));
    }
    let points = grid.points();
    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|pi| (0..runs).map(move |r| (pi, r)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Sl0Error::InvalidConfig(format!("thread pool: {e}")))?;
    let trials: Vec<TrialOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(pi, r)| {
                let seed = base_seed.wrapping_add(r as u64);
                TrialOutcome {
                    point_index: pi,
                    run_index: r,
                    seed,
                    result: run_trial(grid, &points[pi], seed, r),
                }
            })
            .collect()
    });

    let rows = points
        .iter()
        .enumerate()
        .map(|(pi, p)| summarize(*p, runs, &trials[pi * runs..(pi + 1) * runs]))
        .collect();
    Ok(SweepTable { rows, trials })
}
