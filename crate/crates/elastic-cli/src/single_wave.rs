use elastic_oracle::{
    char_net_path, lambda2, riccati_blowup_time, riccati_ode, riccati_slope, single_wave_invariants, OracleError,
    trace_characteristic, SimpleWave, W2Path,
};
use serde::Serialize;

use crate::config::{RunConfig, SingleWaveOptions};
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};

const TOL_FORMULA: f64 = 1e-6;
const TOL_BLOWUP: f64 = 0.03;
/// Allowed invariant drift per unit time.
const TOL_DRIFT: f64 = 1e-8;
/// Fraction of the blow-up time over which formula and ODE are compared.
const COMPARE_FRACTION: f64 = 0.9;
const ODE_SUBSTEPS: usize = 64;
/// Constant invariant of the simple waves used for the drift check.
const BACKGROUND: f64 = 0.05;

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(4)
    }
}

fn dbump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        -8.0 * s * (1.0 - s * s).powi(3)
    }
}

#[derive(Debug, Clone, Serialize)]
struct Summary {
    slope0: f64,
    blowup_formula: f64,
    blowup_numeric: f64,
    formula_vs_ode: f64,
    w2_drift_rate: f64,
    w1_drift_rate: f64,
}

fn drift_rate(o: &SingleWaveOptions, family: u8) -> Result<f64, CliError> {
    let w1_0 = |y: f64| o.a1 * bump((y - 0.5) / 0.5);
    // Family 2 carries W₁ with W₂ fixed; family 1 carries W₂ with W₁ fixed.
    let (wave, bounds) = if family == 2 {
        let w = SimpleWave { family: 2, profile: w1_0, fixed: BACKGROUND };
        (w, (lambda2(o.a1, BACKGROUND), lambda2(0.0, BACKGROUND)))
    } else {
        let w = SimpleWave { family: 1, profile: w1_0, fixed: -BACKGROUND };
        (w, (-lambda2(-BACKGROUND, o.a1), -lambda2(-BACKGROUND, 0.0)))
    };
    let mut worst = 0.0f64;
    for y in [0.2, 0.35, 0.5, 0.7] {
        let v = |x: f64, t: f64| wave.state(x, t, bounds).unwrap_or((f64::NAN, f64::NAN));
        let tr = trace_characteristic(v, family, y, o.trace_time, o.dt);
        for (t, x) in tr {
            let (v1, v2) = wave.state(x, t, bounds)?;
            let (w1, w2) = single_wave_invariants(v1, v2)?;
            let carried = if family == 2 { w1 } else { w2 };
            if !carried.is_finite() {
                return Err(OracleError::NotFinite { t }.into());
            }
            worst = worst.max((carried - w1_0(y)).abs());
        }
    }
    Ok(worst / o.trace_time)
}

pub fn single_wave(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let o = &cfg.single_wave;
    let w1_0 = |y: f64| o.a1 * bump((y - 0.5) / 0.5);
    let w2_0 = |y: f64| o.a2 * bump(y - 3.0);
    let path = W2Path::from_path(&char_net_path(w1_0, w2_0, o.y2, o.h, o.n)?)?;
    let m = o.a1 * dbump((o.y2 - 0.5) / 0.5) / 0.5;
    let mut out = Outcome::default();
    out.checks.push(Check::at_least("initial slope", m, f64::MIN_POSITIVE));
    if !(m > 0.0) {
        return Ok(out);
    }

    let tb = riccati_blowup_time(&path, m)?;
    let ode = riccati_ode(&path, m, COMPARE_FRACTION * tb, ODE_SUBSTEPS, f64::INFINITY)?;
    let mut worst = 0.0f64;
    let mut table = Table::new("riccati.csv", &["t", "w2", "formula", "ode", "denominator", "i_t"]);
    for &(t, q) in &ode {
        let r = riccati_slope(&path, m, t)?;
        worst = worst.max(((r.slope - q) / r.slope).abs());
        table.rows.push(vec![t, path.eval(t).0, r.slope, q, r.denominator, r.i_t]);
    }
    out.tables.push(table);
    out.checks.push(Check::at_most("formula vs Riccati ODE (relative)", worst, TOL_FORMULA));

    let run = riccati_ode(&path, m, path.t_end(), ODE_SUBSTEPS, 1.0 / o.tol)?;
    let &(t_num, q_num) = run.last().expect("the ODE run has at least its initial point");
    out.checks.push(Check::at_least("numeric slope reaches 1/tol", q_num, 1.0 / o.tol));
    out.checks.push(Check::at_most("blow-up time relative mismatch", ((t_num - tb) / tb).abs(), TOL_BLOWUP));

    let w1_drift = drift_rate(o, 2)?;
    let w2_drift = drift_rate(o, 1)?;
    out.checks.push(Check::at_most("W1 drift along 2-characteristics per unit time", w1_drift, TOL_DRIFT));
    out.checks.push(Check::at_most("W2 drift along 1-characteristics per unit time", w2_drift, TOL_DRIFT));
    out.detail(
        "single_wave",
        &Summary {
            slope0: m,
            blowup_formula: tb,
            blowup_numeric: t_num,
            formula_vs_ode: worst,
            w2_drift_rate: w2_drift,
            w1_drift_rate: w1_drift,
        },
    )?;
    Ok(out)
}
