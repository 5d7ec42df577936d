use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use elastic_cli::{execute, summary, CliError, Mode, RunConfig};

/// Structure checks, shock simulations, oracle comparisons and η-sweeps.
#[derive(Parser, Debug)]
#[command(name = "elastic", version)]
struct Args {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// verify-structure, simulate, compare-oracle, sweep-eta or single-wave.
    #[arg(long)]
    mode: Option<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallel sweep jobs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Sampling seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: Args) -> Result<bool, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &args.mode {
        cfg.mode = Some(Mode::parse(m).ok_or_else(|| CliError::config("--mode", format!("unknown mode `{m}`")))?);
    }
    let mode = cfg.mode.ok_or_else(|| CliError::config("mode", "no mode given (config `mode` or --mode)"))?;
    if let Some(o) = args.out {
        cfg.output_dir = o;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.jobs == 0 {
        return Err(CliError::config("--jobs", "must be at least 1"));
    }
    let outcome = execute(&cfg, mode, args.jobs)?;
    print!("{}", summary(mode.name(), &outcome));
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
