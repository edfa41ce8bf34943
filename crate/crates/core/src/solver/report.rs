use std::fmt::Write;
use std::time::Duration;

use crate::linalg::DenseVector;

/// State at the end of one sigma level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub sigma: f64,
    pub f_sigma: f64,
    pub residual_norm: f64,
    pub inner_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub estimate: DenseVector,
    pub trace: Vec<LevelRecord>,
    /// Estimate after each level, filled only when requested in the config.
    pub iterates: Vec<DenseVector>,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn total_inner_iterations(&self) -> usize {
        self.trace.iter().map(|r| r.inner_iterations).sum()
    }

    /// One CSV row per sigma level followed by a `summary` row holding the
    /// final `F`, final residual and the total inner iteration count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,F,residual,inner_iters\n");
        for r in &self.trace {
            writeln!(
                out,
                "{:e},{:e},{:e},{}",
                r.sigma, r.f_sigma, r.residual_norm, r.inner_iterations
            )
            .unwrap();
        }
        let (f, res) = self
            .trace
            .last()
            .map_or((f64::NAN, f64::NAN), |r| (r.f_sigma, r.residual_norm));
        writeln!(out, "summary,{f:e},{res:e},{}", self.total_inner_iterations()).unwrap();
        out
    }

    /// Everything except the wall-clock time, for reproducibility checks.
    pub fn same_result_as(&self, other: &SolveReport) -> bool {
        self.estimate == other.estimate && self.trace == other.trace && self.iterates == other.iterates
    }
}
