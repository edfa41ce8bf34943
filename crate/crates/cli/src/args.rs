use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sl0::expgen::SolverKind;
use sl0::penalty::PenaltyFamily;
use sl0::solver::{
    ScheduleSpec, Sigma1, SigmaSchedule, SolverConfig, Termination, DEFAULT_INNER_ITERS,
    DEFAULT_MAX_INNER, DEFAULT_MU,
};

#[derive(Debug, Parser)]
#[command(name = "sl0", version, about = "Sparse recovery by smoothed l0 maximisation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random Bernoulli-Gaussian problem and write A.mat, s.vec, x.vec.
    Gen(GenArgs),
    /// Recover a sparse s from A and x.
    Solve(SolveArgs),
    /// Recover one sparse column per column of X, sharing one factorisation.
    Batch(BatchArgs),
    /// Run a Monte Carlo sweep over a parameter grid and write a CSV table.
    Sweep(SweepArgs),
    /// Print the a-posteriori error bound for an estimate.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of sources (columns of A).
    #[arg(long)]
    pub m: usize,
    /// Number of sensors (rows of A).
    #[arg(long)]
    pub n: usize,
    /// Mean number of active sources; activity probability is k/m.
    #[arg(long, group = "activity")]
    pub k: Option<f64>,
    /// Activity probability of each source.
    #[arg(long, group = "activity")]
    pub p: Option<f64>,
    /// Activate exactly this many sources.
    #[arg(long, group = "activity")]
    pub exact_k: Option<usize>,
    /// Standard deviation of active sources.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_on: f64,
    /// Standard deviation of inactive sources.
    #[arg(long, default_value_t = 0.0)]
    pub sigma_off: f64,
    /// Per-component standard deviation of the sensor noise.
    #[arg(long, default_value_t = 0.01)]
    pub noise_sigma: f64,
    #[arg(long, env = "SL0_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving A.mat, s.vec, x.vec and params.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// A fixed number of steps per sigma.
    Fixed,
    /// Step until F reaches a target.
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigma1Arg(pub Sigma1);

impl FromStr for Sigma1Arg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Sigma1Arg(Sigma1::Auto));
        }
        s.parse::<f64>()
            .map(|v| Sigma1Arg(Sigma1::Fixed(v)))
            .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
    }
}

fn parse_family(s: &str) -> Result<PenaltyFamily, String> {
    s.parse().map_err(|e: sl0::Sl0Error| e.to_string())
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: sl0::Sl0Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    /// First sigma of a geometric schedule: a number or "auto" (2 max|s0|).
    #[arg(long, default_value = "1")]
    pub sigma1: Sigma1Arg,
    /// Decay factor of a geometric schedule; without it the default schedule is used.
    #[arg(long)]
    pub c: Option<f64>,
    /// Last sigma of a geometric schedule.
    #[arg(long, default_value_t = 0.01)]
    pub sigma_min: f64,
    /// Explicit decreasing sigma list, overriding --sigma1/--c/--sigma-min.
    #[arg(long, value_delimiter = ',', conflicts_with = "c")]
    pub schedule: Option<Vec<f64>>,
    /// Step size of the ascent step.
    #[arg(long, default_value_t = DEFAULT_MU)]
    pub mu: f64,
    /// Ascent steps per sigma in fixed mode.
    #[arg(short = 'L', long = "inner-iters", default_value_t = DEFAULT_INNER_ITERS)]
    pub inner_iters: usize,
    #[arg(long, value_parser = parse_family, default_value = "gaussian")]
    pub family: PenaltyFamily,
    #[arg(long, value_enum, default_value_t = Mode::Fixed)]
    pub mode: Mode,
    /// Threshold mode target for F; defaults to m - n/2.
    #[arg(long)]
    pub target_f: Option<f64>,
    /// Threshold mode step limit per sigma.
    #[arg(long, default_value_t = DEFAULT_MAX_INNER)]
    pub max_inner: usize,
}

impl SolverFlags {
    pub fn config(&self) -> sl0::Result<SolverConfig> {
        let schedule = match (&self.schedule, self.c) {
            (Some(values), _) => ScheduleSpec::Explicit(SigmaSchedule::new(values.clone())?),
            (None, Some(c)) => ScheduleSpec::Geometric {
                sigma1: self.sigma1.0,
                c,
                sigma_min: self.sigma_min,
            },
            (None, None) => ScheduleSpec::default(),
        };
        let mode = match self.mode {
            Mode::Fixed => Termination::FixedL,
            Mode::Threshold => Termination::ThresholdF {
                target_f: self.target_f,
                max_inner: self.max_inner,
            },
        };
        let cfg = SolverConfig {
            schedule,
            mu: self.mu,
            inner_iters: self.inner_iters,
            family: self.family,
            mode,
            record_iterates: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Mixing matrix file.
    #[arg(long)]
    pub a: PathBuf,
    /// Observation vector file.
    #[arg(long)]
    pub x: PathBuf,
    /// Where to write the estimate.
    #[arg(long, default_value = "s_hat.vec")]
    pub out: PathBuf,
    /// Where to write the per-sigma trace.
    #[arg(long, default_value = "report.csv")]
    pub report: PathBuf,
    /// True sources; when given, SNR and MSE are printed.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Mixing matrix file.
    #[arg(long)]
    pub a: PathBuf,
    /// Observation matrix, one problem per column.
    #[arg(long)]
    pub x: PathBuf,
    /// Where to write the estimates, one per column.
    #[arg(long, default_value = "S_hat.mat")]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "400")]
    pub n: Vec<usize>,
    /// Mean number of active sources (exact count with --exact-k).
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub k: Vec<usize>,
    /// Geometric decay factors; without it every point uses --schedule.
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub sigma_min: Vec<f64>,
    #[arg(short = 'L', long = "inner-iters", value_delimiter = ',', default_value = "3")]
    pub inner_iters: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub noise_sigma: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_family, default_value = "gaussian")]
    pub family: Vec<PenaltyFamily>,
    /// Solvers to compare: sl0, irls.
    #[arg(long, value_delimiter = ',', value_parser = parse_solver, default_value = "sl0")]
    pub solver: Vec<SolverKind>,
    /// First sigma of geometric schedules: a number or "auto".
    #[arg(long, default_value = "1")]
    pub sigma1: Sigma1Arg,
    /// Explicit schedule for points without --c.
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.2,0.1,0.05,0.02,0.01")]
    pub schedule: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_MU)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_on: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_off: f64,
    /// Activate exactly k sources per trial.
    #[arg(long)]
    pub exact_k: bool,
    /// Trials per grid point.
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Base seed; trial i of every point uses seed + i.
    #[arg(long, env = "SL0_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Summary table output.
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    /// Also write one row per trial to this file.
    #[arg(long)]
    pub trials_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Mixing matrix file.
    #[arg(long)]
    pub a: PathBuf,
    /// Estimate file.
    #[arg(long)]
    pub s_hat: PathBuf,
}
