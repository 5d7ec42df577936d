use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use elastic_initdata::build_initial_family;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_outcome, Check, Outcome, Table};
use crate::simulate::{run_simulation, simulate_outcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// θ chosen so that W₀ equals the reference run's.
    HeldAmplitude,
    FixedTheta,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub kind: SweepKind,
    pub eta: f64,
    pub theta: f64,
    pub w0: f64,
    pub t_star: Option<f64>,
    /// T*·W₀·|c₁₁(0)|.
    pub normalized: Option<f64>,
    pub in_window: bool,
    pub dir: String,
    pub all_passed: bool,
}

struct Job {
    kind: SweepKind,
    eta: f64,
    theta: f64,
    dir: String,
}

/// W₀ of the data at (η, θ); the data are linear in θ.
fn w0_of(cfg: &RunConfig, eta: f64, theta: f64) -> Result<f64, CliError> {
    let params = cfg.material()?;
    let mut spec = cfg.data_spec()?;
    spec.eta = eta;
    spec.theta = theta;
    Ok(build_initial_family(&spec, &params)?.w0)
}

fn run_job(cfg: &RunConfig, job: &Job, out: &Path) -> Result<SweepRow, CliError> {
    let mut c = cfg.clone();
    c.data.eta = Some(job.eta);
    c.data.theta = Some(job.theta);
    c.simulate.stop_at = None;
    let run = run_simulation(&c)?;
    let outcome = simulate_outcome(&c, &run)?;
    write_outcome(&out.join(&job.dir), "simulate", c.seed, &serde_json::to_value(&c)?, &outcome)?;
    Ok(SweepRow {
        kind: job.kind,
        eta: job.eta,
        theta: job.theta,
        w0: run.w0,
        t_star: run.shock.t_star,
        normalized: run.shock.normalized_t_star,
        in_window: run.shock.in_window,
        dir: job.dir.clone(),
        all_passed: outcome.passed(),
    })
}

/// Runs every job on at most `jobs` threads; results keep job order.
fn run_all(cfg: &RunConfig, list: &[Job], out: &Path, jobs: usize) -> Result<Vec<SweepRow>, CliError> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<SweepRow, CliError>>>> = Mutex::new((0..list.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, list.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = list.get(k) else { break };
                let r = run_job(cfg, job, out).map_err(|e| CliError::Job {
                    job: format!("{} (eta = {}, theta = {})", job.dir, job.eta, job.theta),
                    source: Box::new(e),
                });
                slots.lock().expect("no job panics while holding the lock")[k] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers have finished")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

pub fn sweep_eta(cfg: &RunConfig, out: &Path, jobs: usize) -> Result<Outcome, CliError> {
    let theta = cfg.data_spec()?.theta * cfg.sweep.theta_fraction;
    let w0_ref = w0_of(cfg, cfg.sweep.reference_eta, theta)?;
    let mut list = Vec::new();
    for (k, &eta) in cfg.sweep.etas.iter().enumerate() {
        let held = w0_ref / w0_of(cfg, eta, 1.0)?;
        list.push(Job { kind: SweepKind::HeldAmplitude, eta, theta: held, dir: format!("held_{k}") });
    }
    let held_count = list.len();
    // At the reference η the fixed-θ run is the held run; it is reused.
    let mut reused = Vec::new();
    if cfg.sweep.fixed_theta {
        for (k, &eta) in cfg.sweep.etas.iter().enumerate() {
            if (list[k].theta - theta).abs() <= 1e-12 * theta {
                reused.push(k);
            } else {
                list.push(Job { kind: SweepKind::FixedTheta, eta, theta, dir: format!("fixed_{k}") });
            }
        }
    }
    let mut rows = run_all(cfg, &list, out, jobs)?;
    for k in reused {
        rows.push(SweepRow { kind: SweepKind::FixedTheta, ..rows[k].clone() });
    }
    rows[held_count..].sort_by(|a, b| b.eta.total_cmp(&a.eta));

    let mut outcome = Outcome::default();
    for r in rows.iter().filter(|r| r.kind == SweepKind::HeldAmplitude) {
        let name = format!("held W0, eta = {}: T* |c11(0)| W0 in bracket", r.eta);
        outcome.checks.push(Check::holds(name, r.in_window));
    }
    // With θ fixed, W₀ grows as η shrinks and the shock comes earlier.
    let mut fixed: Vec<&SweepRow> = rows.iter().filter(|r| r.kind == SweepKind::FixedTheta).collect();
    fixed.sort_by(|a, b| b.eta.total_cmp(&a.eta));
    if fixed.len() >= 2 {
        let ok = fixed.windows(2).all(|w| match (w[0].t_star, w[1].t_star) {
            (Some(a), Some(b)) => b < a,
            _ => false,
        });
        outcome.checks.push(Check::holds("fixed theta: T* decreases with eta", ok));
    }
    let mut table = Table::new("sweep.csv", &["held_amplitude", "eta", "theta", "w0", "t_star", "t_star_w0_c11"]);
    for r in &rows {
        table.rows.push(vec![
            if r.kind == SweepKind::HeldAmplitude { 1.0 } else { 0.0 },
            r.eta,
            r.theta,
            r.w0,
            r.t_star.unwrap_or(f64::NAN),
            r.normalized.unwrap_or(f64::NAN),
        ]);
    }
    outcome.tables.push(table);
    outcome.detail("reference_w0", &w0_ref)?;
    outcome.detail("runs", &rows)?;
    Ok(outcome)
}
