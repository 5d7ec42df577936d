//! Config-driven runner for the elastic-wave toolkit. Each mode returns an
//! [`Outcome`] of named checks plus artifacts; [`execute`] writes them.

mod compare;
mod config;
mod error;
mod output;
mod simulate;
mod single_wave;
mod sweep;
mod verify;

use std::path::Path;

pub use compare::{compare_at, compare_oracle, field_difference, observed_order, FieldComparison};
pub use config::{
    CompareOptions, DataSpec, Dim, MaterialSpec, Mode, RunConfig, SimulateOptions, SingleWaveOptions, StructureOptions,
    SweepOptions,
};
pub use error::CliError;
pub use output::{fmt17, summary, write_outcome, Check, Outcome, Table};
pub use simulate::{rhod_tau, run_simulation, simulate_outcome, timeseries_table};
pub use single_wave::single_wave;
pub use sweep::{sweep_eta, SweepKind, SweepRow};
pub use verify::{verify_structure, FrameStats, SobolevRow};

/// Validates the config for `mode` and runs it. Sweep jobs write their own
/// subdirectories of `out`.
pub fn run_mode(cfg: &RunConfig, mode: Mode, out: &Path, jobs: usize) -> Result<Outcome, CliError> {
    cfg.validate(mode)?;
    match mode {
        Mode::VerifyStructure => verify_structure(cfg),
        Mode::Simulate => simulate_outcome(cfg, &run_simulation(cfg)?),
        Mode::CompareOracle => compare_oracle(cfg),
        Mode::SweepEta => sweep_eta(cfg, out, jobs),
        Mode::SingleWave => single_wave(cfg),
    }
}

/// Runs `mode` and writes report.json, summary.txt and the CSV tables to
/// `cfg.output_dir`.
pub fn execute(cfg: &RunConfig, mode: Mode, jobs: usize) -> Result<Outcome, CliError> {
    let out = cfg.output_dir.clone();
    let outcome = run_mode(cfg, mode, &out, jobs)?;
    let mut recorded = cfg.clone();
    recorded.mode = Some(mode);
    write_outcome(&out, mode.name(), cfg.seed, &serde_json::to_value(&recorded)?, &outcome)?;
    Ok(outcome)
}
