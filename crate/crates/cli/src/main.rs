mod args;
mod files;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use sl0::expgen::{
    generate_problem, mse, run_sweep, snr_db, Activity, ProblemSpec, SourceModel, SweepGrid,
};
use sl0::linalg::{format_matrix, format_vector, DenseMatrix};
use sl0::solver::{error_upper_bound, sl0_solve, sl0_solve_batch, SigmaSchedule};
use sl0::Sl0Error;

use args::{BatchArgs, BoundArgs, Cli, Command, GenArgs, SolveArgs, SweepArgs};
use files::{read_matrix, read_vector, write_all, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Batch(a) => batch(a),
        Command::Sweep(a) => sweep(a),
        Command::Bound(a) => bound(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Lib(Sl0Error::TooLarge { max_cols, limit, .. }) = &e {
                eprintln!(
                    "hint: exhaustive subset enumeration is limited to {max_cols} columns and {limit} subsets"
                );
            }
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Serialize)]
struct GenParams {
    m: usize,
    n: usize,
    activity: &'static str,
    p: Option<f64>,
    exact_k: Option<usize>,
    sigma_on: f64,
    sigma_off: f64,
    noise_sigma: f64,
    seed: u64,
}

fn gen(args: GenArgs) -> Result<(), CliError> {
    let activity = match (args.k, args.p, args.exact_k) {
        (_, _, Some(k)) => Activity::ExactK(k),
        (_, Some(p), _) => Activity::Probability(p),
        (Some(k), _, _) if args.m > 0 => Activity::Probability(k / args.m as f64),
        _ => return Err(CliError::Usage("one of --k, --p or --exact-k is required".into())),
    };
    let sources = SourceModel { m: args.m, activity, sigma_on: args.sigma_on, sigma_off: args.sigma_off };
    let spec = ProblemSpec { n: args.n, sources, noise_sigma: args.noise_sigma };
    let problem = generate_problem(&spec, args.seed)?;
    let params = GenParams {
        m: args.m,
        n: args.n,
        activity: if args.exact_k.is_some() { "exact_k" } else { "probability" },
        p: match activity {
            Activity::Probability(p) => Some(p),
            Activity::ExactK(_) => None,
        },
        exact_k: args.exact_k,
        sigma_on: args.sigma_on,
        sigma_off: args.sigma_off,
        noise_sigma: args.noise_sigma,
        seed: args.seed,
    };
    let json = serde_json::to_string_pretty(&params).expect("plain struct serialises") + "\n";
    let dir = &args.out_dir;
    write_all(&[
        (dir.join("A.mat"), format_matrix(&problem.a)),
        (dir.join("s.vec"), format_vector(&problem.s)),
        (dir.join("x.vec"), format_vector(&problem.x)),
        (dir.join("params.json"), json),
    ])
}

fn solve(args: SolveArgs) -> Result<(), CliError> {
    let cfg = args.solver.config()?;
    let a = read_matrix(&args.a)?;
    let x = read_vector(&args.x)?;
    let truth = args.truth.as_deref().map(read_vector).transpose()?;
    let report = sl0_solve(&a, &x, &cfg)?;
    let scores = truth
        .map(|s| Ok::<_, Sl0Error>((snr_db(&s, &report.estimate)?, mse(&s, &report.estimate)?)))
        .transpose()?;
    write_all(&[
        (args.out.clone(), format_vector(&report.estimate)),
        (args.report.clone(), report.to_csv()),
    ])?;
    println!("levels: {}", report.trace.len());
    println!("inner iterations: {}", report.total_inner_iterations());
    if let Some(last) = report.trace.last() {
        println!("final F: {:e}", last.f_sigma);
        println!("residual: {:e}", last.residual_norm);
    }
    println!("time: {:e} s", report.wall_time.as_secs_f64());
    if let Some((snr, err)) = scores {
        println!("snr_db: {snr:e}");
        println!("mse: {err:e}");
    }
    Ok(())
}

fn batch(args: BatchArgs) -> Result<(), CliError> {
    let cfg = args.solver.config()?;
    let a = read_matrix(&args.a)?;
    let x = read_matrix(&args.x)?;
    let started = Instant::now();
    let reports = sl0_solve_batch(&a, &x, &cfg)?;
    let elapsed = started.elapsed().as_secs_f64();
    let (m, t) = (a.cols(), reports.len());
    let mut data = vec![0.0; m * t];
    for (j, r) in reports.iter().enumerate() {
        for (i, v) in r.estimate.as_slice().iter().enumerate() {
            data[i * t + j] = *v;
        }
    }
    let estimates = DenseMatrix::from_row_major(m, t, data)?;
    write_all(&[(args.out.clone(), format_matrix(&estimates))])?;
    println!("samples: {t}");
    println!("time: {elapsed:e} s");
    println!("per sample: {:e} s", elapsed / t as f64);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let grid = SweepGrid {
        m: args.m,
        n: args.n,
        k: args.k,
        c: match args.c {
            Some(cs) => cs.into_iter().map(Some).collect(),
            None => vec![None],
        },
        sigma_min: args.sigma_min,
        inner_iters: args.inner_iters,
        noise_sigma: args.noise_sigma,
        family: args.family,
        solver: args.solver,
        sigma1: args.sigma1.0,
        schedule: SigmaSchedule::new(args.schedule)?,
        mu: args.mu,
        sigma_on: args.sigma_on,
        sigma_off: args.sigma_off,
        exact_k: args.exact_k,
        ..SweepGrid::default()
    };
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let table = run_sweep(&grid, args.runs, args.seed, jobs)?;
    let mut outputs = vec![(args.out.clone(), table.to_csv())];
    if let Some(path) = args.trials_csv {
        outputs.push((path, table.trials_csv()));
    }
    write_all(&outputs)?;
    let failures: usize = table.rows.iter().map(|r| r.failures).sum();
    println!("points: {}", table.rows.len());
    println!("trials: {}", table.trials.len());
    println!("failed trials: {failures}");
    Ok(())
}

fn bound(args: BoundArgs) -> Result<(), CliError> {
    let a = read_matrix(&args.a)?;
    let s_hat = read_vector(&args.s_hat)?;
    let b = error_upper_bound(&a, &s_hat)?;
    println!("alpha: {:e}", b.alpha);
    println!("M: {:e}", b.m_const);
    println!("bound: {:e}", b.bound);
    Ok(())
}
