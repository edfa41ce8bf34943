//! Synthetic sparse recovery problems and Monte Carlo sweeps over them.
//!
//! Every random draw comes from a ChaCha8 stream keyed by a 64-bit seed and
//! a stream id, so a trial's matrix, sources and noise are independent of
//! each other and reproducible bit-for-bit from the seed alone.

mod metrics;
mod source;
mod sweep;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use metrics::{mse, snr_db, TrialResult, SNR_CAP_DB};
pub use source::{
    generate_mixing, generate_problem, generate_sources, mix, Activity, MixingSpec, Problem,
    ProblemSpec, SourceModel,
};
pub use sweep::{
    run_sweep, run_trial, GridPoint, SolverKind, SweepGrid, SweepRow, SweepTable, TrialOutcome,
};

/// Stream ids for the independent draws of one trial.
pub mod stream {
    pub const MIXING: u64 = 0;
    pub const SOURCES: u64 = 1;
    pub const NOISE: u64 = 2;
}

/// The generator behind every random draw in this module.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
