use elastic_charsolver::{initial_phi, simulate, FieldSnapshot, RunOptions, SolverConfig};
use elastic_initdata::{build_initial_family, InitialFamilies};
use elastic_model::{MaterialParams, Vec6};
use elastic_oracle::{fv_solve, FvConfig, FvField};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};

/// Margin around both windows, in units of η.
const MARGIN: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldComparison {
    pub t: f64,
    pub cells_per_eta: f64,
    pub dx: f64,
    pub frame_speed: f64,
    pub fv_cells: usize,
    pub fv_steps: usize,
    /// max|Φ_fv − Φ_cs| / max|Φ_cs| over the characteristic solver's window.
    pub linf_relative: f64,
    /// Same difference over the variation max|Φ_cs − Φ_cs(left edge)|.
    pub linf_over_variation: f64,
}

fn max_abs(v: &Vec6) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Runs the characteristic solver to `t` and the finite-volume oracle on a
/// window that starts around the data and follows the first-family pulse,
/// then compares the two fields where the former is defined.
pub fn compare_at(
    params: &MaterialParams,
    data: &InitialFamilies,
    cfg: &SolverConfig,
    t: f64,
) -> Result<FieldComparison, CliError> {
    let opts = RunOptions { stop_at: Some(t), snapshot_times: Vec::new() };
    let run = simulate(params, data, cfg, &opts)?;
    let cs = &run.final_field;
    let fv = fv_matching(params, data, cs)?;
    let (frame_speed, fv_cells, fv_steps) = (fv.1, fv.0.phi.len(), fv.0.steps);
    let (linf_relative, linf_over_variation) = field_difference(cs, &fv.0);
    Ok(FieldComparison {
        t: cs.t,
        cells_per_eta: cfg.cells_per_eta,
        dx: cs.dx,
        frame_speed,
        fv_cells,
        fv_steps,
        linf_relative,
        linf_over_variation,
    })
}

/// Oracle field at the snapshot time on the snapshot's spacing.
fn fv_matching(
    params: &MaterialParams,
    data: &InitialFamilies,
    cs: &FieldSnapshot,
) -> Result<(FvField, f64), CliError> {
    let eta = data.eta;
    let dx = cs.dx;
    let width_cs = cs.dx * (cs.phi.len() - 1) as f64;
    let len = (eta + 2.0 * MARGIN * eta).max(width_cs + 2.0 * MARGIN * eta);
    let center0 = 1.5 * eta;
    let center_t = cs.x0 + 0.5 * width_cs;
    let s = if cs.t > 0.0 { (center_t - center0) / cs.t } else { 0.0 };
    let n = (len / dx).ceil() as usize + 1;
    let x0 = center0 - 0.5 * (n - 1) as f64 * dx;
    let phi0 = initial_phi(data, params, x0, dx, n)?;
    let cfg = FvConfig { frame_speed: s, ..FvConfig::default() };
    let mut out = fv_solve(x0, dx, &phi0, params, cs.t, &[], &cfg)?;
    Ok((out.pop().expect("fv_solve returns the final field"), s))
}

/// (difference / max|Φ_cs|, difference / variation of Φ_cs).
pub fn field_difference(cs: &FieldSnapshot, fv: &FvField) -> (f64, f64) {
    let base = cs.phi[0];
    let (mut diff, mut scale, mut var) = (0.0f64, 0.0f64, 0.0f64);
    for (j, p) in cs.phi.iter().enumerate() {
        let q = fv.at(cs.x0 + j as f64 * cs.dx);
        let d: Vec6 = std::array::from_fn(|k| q[k] - p[k]);
        let v: Vec6 = std::array::from_fn(|k| p[k] - base[k]);
        diff = diff.max(max_abs(&d));
        scale = scale.max(max_abs(p));
        var = var.max(max_abs(&v));
    }
    (diff / scale, diff / var)
}

/// Required accuracy at the configured resolution and observed order.
const TOL_LINF: f64 = 0.02;
const MIN_ORDER: f64 = 1.0;

/// Least-squares slope of ln(difference) against ln(dx).
pub fn observed_order(levels: &[FieldComparison]) -> Option<f64> {
    if levels.len() < 2 {
        return None;
    }
    let x: Vec<f64> = levels.iter().map(|c| c.dx.ln()).collect();
    let y: Vec<f64> = levels.iter().map(|c| c.linf_relative.ln()).collect();
    Some(elastic_charsolver::linear_fit(&x, &y).slope)
}

/// Shock time from a full run unless configured, then one comparison per
/// refinement level at the configured fraction of it.
pub fn compare_oracle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.material()?;
    let data = build_initial_family(&cfg.data_spec()?, &params)?;
    let t_star = match cfg.compare.t_star {
        Some(t) => t,
        None => {
            let run = simulate(&params, &data, &cfg.solver, &RunOptions::default())?;
            run.shock.t_star.ok_or_else(|| {
                CliError::Solver(elastic_charsolver::SolverError::Config("no shock detected; set compare.t_star".into()))
            })?
        }
    };
    let t = cfg.compare.fraction * t_star;
    let levels: Vec<FieldComparison> = cfg
        .compare
        .levels
        .iter()
        .map(|&l| compare_at(&params, &data, &SolverConfig { cells_per_eta: l, ..cfg.solver.clone() }, t))
        .collect::<Result<_, _>>()?;

    let mut out = Outcome::default();
    let at_default = levels
        .iter()
        .find(|c| c.cells_per_eta == cfg.solver.cells_per_eta)
        .unwrap_or_else(|| levels.last().expect("levels are non-empty"));
    out.checks.push(Check::at_most(
        format!("Linf relative difference at eta/{}", at_default.cells_per_eta),
        at_default.linf_relative,
        TOL_LINF,
    ));
    if let Some(order) = observed_order(&levels) {
        out.checks.push(Check::at_least("observed convergence order", order, MIN_ORDER));
    }
    out.detail("t_star", &t_star)?;
    out.detail("t", &t)?;
    out.detail("levels", &levels)?;
    let mut table = Table::new(
        "compare.csv",
        &["cells_per_eta", "dx", "t", "frame_speed", "fv_cells", "fv_steps", "linf_relative", "linf_over_variation"],
    );
    for c in &levels {
        table.rows.push(vec![
            c.cells_per_eta,
            c.dx,
            c.t,
            c.frame_speed,
            c.fv_cells as f64,
            c.fv_steps as f64,
            c.linf_relative,
            c.linf_over_variation,
        ]);
    }
    out.tables.push(table);
    Ok(out)
}
