use elastic_coupling::structure_report_seeded;
use elastic_initdata::{lindblad_profile, sobolev_h1_estimate, sobolev_hhalf_estimate, HHalfOptions};
use elastic_model::{coefficient_matrix, sample_ball, spectrum_with, DimMode, MaterialParams, Normalization};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{MaterialSpec, RunConfig};
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};

const TOL_BIORTHOGONAL: f64 = 1e-10;
const TOL_EIGEN: f64 = 1e-9;
/// Relative tolerance on the θ² scaling of the squared estimates.
const TOL_THETA_SCALING: f64 = 1e-6;
/// Allowed spread (max/min) of estimate-to-bound ratios across η.
const SOBOLEV_SPREAD: f64 = 3.0;
/// c₁₁(0) of the default material (same in 3D and 2D).
const DEFAULT_C11_ZERO: f64 = -0.75;
const TOL_C11: f64 = 1e-12;
/// Required eigenvalue gap at rest as a fraction of c₁ − c₂.
const GAP_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Serialize)]
pub struct FrameStats {
    pub samples: usize,
    pub max_biorthogonality: f64,
    /// max ‖A rᵢ − λᵢ rᵢ‖ / (‖A‖ ‖rᵢ‖), same for left vectors.
    pub max_eigen_residual: f64,
    pub gap_at_rest: f64,
    pub min_gap: f64,
}

fn frame_stats(params: &MaterialParams, samples: usize, seed: u64) -> Result<FrameStats, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n();
    let mut st = FrameStats {
        samples,
        max_biorthogonality: 0.0,
        max_eigen_residual: 0.0,
        gap_at_rest: f64::INFINITY,
        min_gap: f64::INFINITY,
    };
    for j in 0..=samples {
        let phi = if j == 0 { vec![0.0; n] } else { sample_ball(&mut rng, n, params.ball_radius()) };
        let a = coefficient_matrix(&phi, params)?;
        let scale = a.norm();
        for norm_kind in [Normalization::Natural, Normalization::UnitPolarization] {
            let s = spectrum_with(&phi, params, None, norm_kind)?;
            for i in 0..n {
                for k in 0..n {
                    let dot: f64 = s.lefts[i].iter().zip(&s.rights[k]).map(|(x, y)| x * y).sum();
                    let target = if i == k { 1.0 } else { 0.0 };
                    st.max_biorthogonality = st.max_biorthogonality.max((dot - target).abs());
                }
                let (r, l, lam) = (&s.rights[i], &s.lefts[i], s.lambdas[i]);
                let mut res_r = 0.0;
                let mut res_l = 0.0;
                for row in 0..n {
                    let ar: f64 = (0..n).map(|c| a[(row, c)] * r[c]).sum();
                    let la: f64 = (0..n).map(|c| l[c] * a[(c, row)]).sum();
                    res_r += (ar - lam * r[row]).powi(2);
                    res_l += (la - lam * l[row]).powi(2);
                }
                let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                let ln = l.iter().map(|x| x * x).sum::<f64>().sqrt();
                let rel = (res_r.sqrt() / (scale * rn)).max(res_l.sqrt() / (scale * ln));
                st.max_eigen_residual = st.max_eigen_residual.max(rel);
            }
            let gap = s.lambdas.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
            if j == 0 {
                st.gap_at_rest = st.gap_at_rest.min(gap);
            }
            st.min_gap = st.min_gap.min(gap);
        }
    }
    Ok(st)
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevRow {
    pub eta: f64,
    pub theta: f64,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

fn sobolev_estimate(mode: DimMode, eta: f64, theta: f64, alpha: f64) -> Result<SobolevRow, CliError> {
    let profile = lindblad_profile(eta, theta, alpha)?;
    let (value, bound, ratio) = match mode {
        DimMode::Planar3D => {
            let e = sobolev_h1_estimate(&profile, eta, theta, alpha);
            (e.value, e.bound, e.ratio)
        }
        DimMode::Planar2D => {
            let e = sobolev_hhalf_estimate(&profile, eta, theta, alpha, HHalfOptions::default());
            (e.value, e.bound, e.ratio)
        }
    };
    Ok(SobolevRow { eta, theta, value, bound, ratio })
}

pub fn verify_structure(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.material()?;
    let spec = cfg.data_spec()?;
    let mode = params.dim_mode;
    let mut out = Outcome::default();

    let fs = frame_stats(&params, cfg.structure.frame_samples, cfg.seed)?;
    out.checks.push(Check::at_most("biorthogonality", fs.max_biorthogonality, TOL_BIORTHOGONAL));
    out.checks.push(Check::at_most("eigen residual (relative)", fs.max_eigen_residual, TOL_EIGEN));
    // In 3D λ₂ = λ₃ on a slice, so strict separation is a 2D property.
    if mode == DimMode::Planar2D {
        let gap_floor = GAP_FRACTION * (params.c1 - params.c2);
        out.checks.push(Check::at_least("eigenvalue gap at rest", fs.gap_at_rest, gap_floor));
        out.checks.push(Check::at_least(
            "eigenvalue gap over the ball relative to rest",
            fs.min_gap / fs.gap_at_rest,
            GAP_FRACTION,
        ));
    }
    out.detail("frames", &fs)?;

    let rep = structure_report_seeded(&params, cfg.structure.samples, cfg.seed);
    for c in &rep.checks {
        let name = format!("structure {}: {}", c.group, c.name);
        out.checks.push(Check { passed: c.passed, ..Check::at_most(name, c.max_residual, c.tolerance) });
    }
    if cfg.material == MaterialSpec::default() {
        let err = (params.c11_at_zero() - DEFAULT_C11_ZERO).abs();
        out.checks.push(Check::at_most("c11(0) of the default material", err, TOL_C11));
    }
    out.detail("c11_zero", &params.c11_at_zero())?;
    out.detail("structure", &rep)?;

    // Sobolev estimates of the first-family data.
    let (theta, alpha) = (spec.theta, spec.alpha);
    let zero = sobolev_estimate(mode, spec.eta, 0.0, alpha)?;
    let one = sobolev_estimate(mode, spec.eta, theta, alpha)?;
    let two = sobolev_estimate(mode, spec.eta, 2.0 * theta, alpha)?;
    let norm_name = match mode {
        DimMode::Planar3D => "H1",
        DimMode::Planar2D => "H1/2",
    };
    out.checks.push(Check::at_most(format!("{norm_name} estimate at theta = 0"), zero.value, 0.0));
    let scaling = (two.value * two.value) / (one.value * one.value) / 4.0 - 1.0;
    out.checks.push(Check::at_most(format!("{norm_name} estimate theta^2 scaling error"), scaling.abs(), TOL_THETA_SCALING));
    let rows: Vec<SobolevRow> = cfg
        .structure
        .sobolev_etas
        .iter()
        .map(|&eta| sobolev_estimate(mode, eta, 1.0, alpha))
        .collect::<Result<_, _>>()?;
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.ratio), b.max(r.ratio)));
    out.checks.push(Check::at_most(format!("{norm_name} ratio spread across eta"), hi / lo, SOBOLEV_SPREAD));
    let mut table = Table::new("sobolev.csv", &["eta", "theta", "value", "bound", "ratio"]);
    for r in [&zero, &one, &two].into_iter().chain(&rows) {
        table.rows.push(vec![r.eta, r.theta, r.value, r.bound, r.ratio]);
    }
    out.tables.push(table);
    out.detail("sobolev", &rows)?;
    Ok(out)
}
