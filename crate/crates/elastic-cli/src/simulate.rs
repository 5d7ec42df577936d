use elastic_charsolver::{simulate, FieldSnapshot, RunOptions, RunResult, StopReason};
use elastic_initdata::build_initial_family;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};

const SMIN_FLOOR: f64 = 0.49;
const SENTINEL_FLOOR: f64 = 0.99 - 1e-3;
const RHOD_TOL: f64 = 0.05;
const FIT_R2: f64 = 0.9;

/// The ±τ trace in the decomposition check spans about one node spacing.
pub fn rhod_tau(run: &RunResult) -> f64 {
    let spacing = run.eta / (run.config.nodes_family1 - 1) as f64;
    spacing / 16.0
}

pub fn run_simulation(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let params = cfg.material()?;
    let data = build_initial_family(&cfg.data_spec()?, &params)?;
    let opts = RunOptions { stop_at: cfg.simulate.stop_at, snapshot_times: Vec::new() };
    Ok(simulate(&params, &data, &cfg.solver, &opts)?)
}

#[derive(Debug, Clone, Serialize)]
struct RunSummary {
    eta: f64,
    w0: f64,
    z0: f64,
    c11_zero: f64,
    t0: f64,
    t_handoff: f64,
    t_end: f64,
    dx: f64,
    stop: String,
    eulerian_steps: usize,
}

pub fn timeseries_table(run: &RunResult) -> Table {
    let mut t = Table::new(
        "timeseries.csv",
        &[
            "t", "rho1_min", "s", "j", "w", "v", "v_a", "v_b", "v_c", "v_d", "ubar", "smin", "blowup",
            "dz_rho1_max", "rho1_z0", "product_error", "sentinel_rho_min", "lambda23_max",
        ],
    );
    for r in &run.series {
        t.rows.push(vec![
            r.t, r.rho1_min, r.s, r.j, r.w, r.v, r.v_parts[0], r.v_parts[1], r.v_parts[2], r.v_parts[3], r.ubar,
            r.smin, r.blowup, r.dz_rho1_max, r.rho1_z0, r.product_error, r.sentinel_rho_min, r.lambda23_max,
        ]);
    }
    t
}

fn field_table(file: String, f: &FieldSnapshot) -> Table {
    let mut t = Table::new(file, &["x", "phi1", "phi2", "phi3", "phi4", "phi5", "phi6"]);
    for (j, p) in f.phi.iter().enumerate() {
        let mut row = vec![f.x(j)];
        row.extend_from_slice(p);
        t.rows.push(row);
    }
    t
}

/// Checks and artifacts of a finished run.
pub fn simulate_outcome(cfg: &RunConfig, run: &RunResult) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let c = &run.checks;
    let s = &run.shock;
    let t_end = run.t_end();
    let shock = run.stop == StopReason::Shock;
    let expect_shock = cfg.simulate.stop_at.is_none();

    if expect_shock {
        out.checks.push(Check::holds("shock detected", shock));
    }
    if let Some(n) = s.normalized_t_star {
        out.checks.push(Check::within("T* |c11(0)| W0", n, s.normalized_window[0], s.normalized_window[1]));
    }
    out.checks.push(Check { passed: s.envelope_ok, ..Check::at_most("rho1(z0) envelope excess", s.envelope_excess, 0.0) });
    out.checks.push(Check::at_least("min rho_i over families 2..n", c.smin, SMIN_FLOOR));
    out.checks.push(Check::at_least("sentinel rho", c.sentinel_rho_min, SENTINEL_FLOOR));
    out.checks.push(Check::holds("blow-up indicator nondecreasing after t0", c.blowup_monotone_after_t0));
    if shock {
        match &s.log_fit {
            Some(fit) => {
                out.checks.push(Check::at_least("blow-up log-fit slope", fit.slope, f64::MIN_POSITIVE));
                out.checks.push(Check::at_least("blow-up log-fit R2", fit.r2, FIT_R2));
            }
            None => out.checks.push(Check::holds("blow-up log-fit available", false)),
        }
    }
    out.checks.push(Check::holds("sup dz rho1 finite", c.dz_rho1_sup.is_finite()));
    if let Some(ts) = s.t_star {
        let rep = run.history.rhod_check(cfg.simulate.rhod_fraction * ts, rhod_tau(run))?;
        out.checks.push(Check::at_most("rho1 decomposition relative error", rep.max_rel_error, RHOD_TOL));
        out.detail("rhod", &rep)?;
    }

    out.detail(
        "run",
        &RunSummary {
            eta: run.eta,
            w0: run.w0,
            z0: run.z0,
            c11_zero: run.c11_zero,
            t0: run.t0,
            t_handoff: run.t_handoff,
            t_end,
            dx: run.dx,
            stop: format!("{:?}", run.stop),
            eulerian_steps: run.eulerian_steps,
        },
    )?;
    let mut shock_json = serde_json::to_value(s)?;
    if let Some(m) = shock_json.as_object_mut() {
        // Already in timeseries.csv.
        for k in ["rho1_min_series", "blowup_series", "dz_rho1_max"] {
            m.remove(k);
        }
    }
    out.details.insert("shock".into(), shock_json);
    out.detail("checks", c)?;

    out.tables.push(timeseries_table(run));
    let base = s.t_star.unwrap_or(t_end);
    for (k, &f) in cfg.simulate.profile_fractions.iter().enumerate() {
        let t = (f * base).min(run.history.t_end());
        let prof = run.history.profile_at(0, t)?;
        let mut table = Table::new(format!("profiles_t{k}.csv"), &["t", "z", "x", "rho", "w", "v", "lambda", "drho"]);
        for (z, r) in run.history.families[0].seeds.iter().zip(&prof) {
            table.rows.push(vec![t, *z, r.x, r.rho, r.w, r.v, r.lambda, r.drho]);
        }
        out.tables.push(table);
    }
    out.tables.push(field_table("field_final.csv".into(), &run.final_field));
    Ok(out)
}
