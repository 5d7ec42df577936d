use elastic_model::{DimMode, MaterialParams};
use serde::{Deserialize, Serialize};

use crate::error::InitDataError;
use crate::profile::{lindblad_profile, Profile};

/// Points used to locate z₀ and to re-check the constraints.
const CHECK_POINTS: usize = 4001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub eta: f64,
    pub theta: f64,
    pub alpha: f64,
    /// Slack ε in the data constraints.
    pub epsilon: f64,
    /// Families other than the first get this fraction of their bound.
    pub bound_fraction: f64,
    /// Amplitude of families 2 and 5 (3D) as a fraction of W₀. Zero keeps
    /// the run in the invariant plane φ₂ = φ₅ = 0.
    pub transverse_fraction: f64,
    /// Sign of each bump, in the family order of the mode; entry 0 is unused.
    pub signs: Vec<f64>,
}

impl InitialDataSpec {
    pub fn default_for(mode: DimMode) -> Self {
        let signs = match mode {
            DimMode::Planar3D => vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0],
            DimMode::Planar2D => vec![1.0, 1.0, 1.0, -1.0],
        };
        InitialDataSpec {
            eta: 0.1,
            theta: 0.04,
            alpha: 0.3,
            epsilon: 0.01,
            bound_fraction: 0.9,
            transverse_fraction: 0.0,
            signs,
        }
    }

    pub fn validate(&self, mode: DimMode) -> Result<(), InitDataError> {
        let bad = |m: String| Err(InitDataError::InvalidSpec(m));
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return bad(format!("theta must be >= 0, got {}", self.theta));
        }
        let alpha_max = match mode {
            DimMode::Planar3D => 0.5,
            DimMode::Planar2D => 1.0,
        };
        if !(self.alpha > 0.0 && self.alpha < alpha_max) {
            return bad(format!("alpha must lie in (0, {alpha_max}), got {}", self.alpha));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return bad(format!("epsilon must lie in (0, 0.5), got {}", self.epsilon));
        }
        if !(self.bound_fraction >= 0.0 && self.bound_fraction <= 1.0) {
            return bad(format!("bound_fraction must lie in [0, 1], got {}", self.bound_fraction));
        }
        if !(self.transverse_fraction >= 0.0 && self.transverse_fraction <= 1.0) {
            return bad(format!(
                "transverse_fraction must lie in [0, 1], got {}",
                self.transverse_fraction
            ));
        }
        if self.signs.len() != mode.n() || self.signs.iter().any(|s| s.abs() != 1.0) {
            return bad(format!("signs must be {} entries of +1 or -1", mode.n()));
        }
        Ok(())
    }
}

/// Upper bounds on sup|wⁱ(·, 0)| / W₀ for every family (family 1 is 1).
pub fn constraint_bounds(mode: DimMode, epsilon: f64, c11_zero: f64) -> Vec<f64> {
    let e = epsilon;
    let base = (1.0 - e).powi(4) / (1.0 + e).powi(3);
    let half = base / 2.0;
    match mode {
        DimMode::Planar3D => {
            let b34 = (base * c11_zero.abs()).min(1.0);
            vec![1.0, 1.0, b34, b34, 1.0, half]
        }
        DimMode::Planar2D => vec![1.0, half, half, half],
    }
}

fn inequality_name(mode: DimMode, family: usize) -> &'static str {
    match (mode, family) {
        (DimMode::Planar3D, 2 | 3) => "sup|w| <= min{(1-e)^4|c11(0)|/(1+e)^3, 1} W0",
        (DimMode::Planar3D, 5) | (DimMode::Planar2D, 1..=3) => "sup|w| <= (1-e)^4/(2(1+e)^3) W0",
        _ => "sup|w| <= W0",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialFamilies {
    pub mode: DimMode,
    pub eta: f64,
    pub profiles: Vec<Profile>,
    pub w0: f64,
    pub z0: f64,
    /// Allowed sup|wⁱ| / W₀ per family.
    pub bounds: Vec<f64>,
    /// Measured sup|wⁱ| / W₀ per family on the check grid.
    pub ratios: Vec<f64>,
}

impl InitialFamilies {
    /// Values of every family at the points of `grid` (outer index: family).
    pub fn sample(&self, grid: &[f64]) -> Vec<Vec<f64>> {
        self.profiles
            .iter()
            .map(|p| grid.iter().map(|&z| p.value(z)).collect())
            .collect()
    }
}

/// Maximizes a unimodal-near-the-peak function on [a, b] by golden section.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Builds all family profiles and re-verifies the data constraints.
pub fn build_initial_family(
    spec: &InitialDataSpec,
    params: &MaterialParams,
) -> Result<InitialFamilies, InitDataError> {
    let mode = params.dim_mode;
    spec.validate(mode)?;
    let c11 = params.c11_at_zero();
    if !(c11 < 0.0) {
        return Err(InitDataError::SignConvention(c11));
    }
    let eta = spec.eta;
    let first = lindblad_profile(eta, spec.theta, spec.alpha)?;
    let grid: Vec<f64> = (0..CHECK_POINTS)
        .map(|j| eta * (1.0 + j as f64 / (CHECK_POINTS - 1) as f64))
        .collect();
    let (jmax, _) = grid
        .iter()
        .map(|&z| first.value(z))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    let lo = grid[jmax.saturating_sub(1)];
    let hi = grid[(jmax + 1).min(CHECK_POINTS - 1)];
    let z0 = golden_max(|z| first.value(z), lo, hi);
    let w0 = first.value(z0);
    if !(w0 > 0.0) {
        return Err(InitDataError::ZeroData);
    }

    let bounds = constraint_bounds(mode, spec.epsilon, c11);
    let n = mode.n();
    let mut profiles = vec![first];
    for i in 1..n {
        let transverse = mode == DimMode::Planar3D && (i == 1 || i == 4);
        let frac = if transverse {
            spec.transverse_fraction
        } else {
            spec.bound_fraction * bounds[i]
        };
        let amplitude = spec.signs[i] * frac * w0;
        profiles.push(if amplitude == 0.0 {
            Profile::Zero
        } else {
            Profile::Bump { eta, amplitude }
        });
    }

    // Re-check on a grid that also extends past the support.
    let outer: Vec<f64> = (0..=400).map(|j| eta * (0.5 + 2.0 * j as f64 / 400.0)).collect();
    let mut ratios = Vec::with_capacity(n);
    for (i, p) in profiles.iter().enumerate() {
        let mut sup = 0.0f64;
        for &z in grid.iter().chain([z0].iter()) {
            let v = p.value(z);
            if i == 0 && v < 0.0 {
                return Err(InitDataError::Constraint {
                    family: i,
                    inequality: "w >= 0".into(),
                    sup: v,
                    limit: 0.0,
                });
            }
            sup = sup.max(v.abs());
        }
        for &z in &outer {
            if (z < eta || z > 2.0 * eta) && p.value(z) != 0.0 {
                return Err(InitDataError::Constraint {
                    family: i,
                    inequality: "supp w in [eta, 2 eta]".into(),
                    sup: p.value(z).abs(),
                    limit: 0.0,
                });
            }
        }
        let limit = bounds[i] * w0;
        if sup > limit * (1.0 + 1e-12) {
            return Err(InitDataError::Constraint {
                family: i,
                inequality: inequality_name(mode, i).into(),
                sup,
                limit,
            });
        }
        ratios.push(sup / w0);
    }
    Ok(InitialFamilies {
        mode,
        eta,
        profiles,
        w0,
        z0,
        bounds,
        ratios,
    })
}
