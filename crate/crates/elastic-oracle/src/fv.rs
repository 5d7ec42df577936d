use elastic_model::{frame6, MaterialParams, Normalization, Vec6};
use serde::{Deserialize, Serialize};

use crate::error::OracleError;

/// Hard stability limit checked every step.
const CFL_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FvConfig {
    pub cfl: f64,
    /// Speed of the computational frame ξ = x − s·t.
    pub frame_speed: f64,
}

impl Default for FvConfig {
    fn default() -> Self {
        FvConfig { cfl: 0.4, frame_speed: 0.0 }
    }
}

/// Field at time `t`; cell j sits at x = x0 + j·dx in the lab frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvField {
    pub t: f64,
    pub x0: f64,
    pub dx: f64,
    pub phi: Vec<Vec6>,
    pub steps: usize,
}

impl FvField {
    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    /// Linear interpolation at lab position `x` (edge value outside).
    pub fn at(&self, x: f64) -> Vec6 {
        let s = (x - self.x0) / self.dx;
        let n = self.phi.len();
        if s <= 0.0 {
            return self.phi[0];
        }
        if s >= (n - 1) as f64 {
            return self.phi[n - 1];
        }
        let j = s.floor() as usize;
        let f = s - j as f64;
        std::array::from_fn(|k| (1.0 - f) * self.phi[j][k] + f * self.phi[j + 1][k])
    }
}

/// The six speeds at Φ.
fn speeds(phi: &Vec6, p: &MaterialParams) -> [f64; 6] {
    let a = p.c1 * p.c1 + 2.0 * p.sigma0 * phi[0];
    let b = p.c2 * p.c2 + 2.0 * p.sigma1 * phi[0];
    let c = 2.0 * p.sigma1 * phi[1];
    let d = 2.0 * p.sigma1 * phi[2];
    let q = c * c + d * d;
    let s = (a - b) + ((a - b) * (a - b) + 4.0 * q).sqrt();
    let (l1, l2, l3) = ((a + 2.0 * q / s).sqrt(), b.sqrt(), (b - 2.0 * q / s).sqrt());
    [l1, l2, l3, -l3, -l2, -l1]
}

/// First-order Lax–Friedrichs-type scheme on the quasilinear form in a
/// frame moving at speed s: central differences of (A(Φⱼ) − s) plus a
/// face dissipation R₀|Λ(Φ̄) − s|L₀ in the eigenbasis at rest.
/// Outflow (copied ghost) boundaries. Returns the field at each requested
/// time (sorted, ≤ t_end) and at t_end.
pub fn fv_solve(
    x0: f64,
    dx: f64,
    phi0: &[Vec6],
    params: &MaterialParams,
    t_end: f64,
    snapshot_times: &[f64],
    cfg: &FvConfig,
) -> Result<Vec<FvField>, OracleError> {
    let n = phi0.len();
    if n < 3 || !(dx > 0.0) || !(t_end >= 0.0) {
        return Err(OracleError::Invalid("need >= 3 cells, dx > 0 and t_end >= 0".into()));
    }
    if !(cfg.cfl > 0.0 && cfg.cfl < CFL_LIMIT) {
        return Err(OracleError::Invalid(format!("cfl must lie in (0, {CFL_LIMIT})")));
    }
    let s = cfg.frame_speed;
    let max_rel = |phi: &[Vec6]| -> f64 {
        phi.iter()
            .map(|p| speeds(p, params).iter().map(|l| (l - s).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let rest = frame6(&[0.0; 6], params, Normalization::UnitPolarization, [0.0, 1.0]);
    let (r0, l0) = (rest.r, rest.l);
    let dt0 = cfg.cfl * dx / max_rel(phi0);
    let mut times: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t >= 0.0 && t < t_end).collect();
    times.sort_by(f64::total_cmp);
    times.push(t_end);

    let mut phi = phi0.to_vec();
    let mut next = phi.clone();
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut diss = vec![[0.0; 6]; n + 1];
    for &target in &times {
        while t < target {
            let dt = dt0.min(target - t);
            let r = dt / dx;
            if steps % 64 == 0 {
                let cfl = max_rel(&phi) * r;
                if cfl > CFL_LIMIT {
                    return Err(OracleError::Cfl { cfl, limit: CFL_LIMIT, t });
                }
            }
            // Face dissipation between cells j−1 and j (faces 0 and n carry none).
            for j in 1..n {
                let (a, b) = (&phi[j - 1], &phi[j]);
                let jump: Vec6 = std::array::from_fn(|k| b[k] - a[k]);
                let mean: Vec6 = std::array::from_fn(|k| 0.5 * (a[k] + b[k]));
                let lam = speeds(&mean, params);
                let mut d = [0.0; 6];
                for m in 0..6 {
                    let coef: f64 = (0..6).map(|k| l0[m][k] * jump[k]).sum::<f64>() * (lam[m] - s).abs();
                    for k in 0..6 {
                        d[k] += coef * r0[m][k];
                    }
                }
                diss[j] = d;
            }
            for j in 0..n {
                let (lft, rgt) = (&phi[j.saturating_sub(1)], &phi[(j + 1).min(n - 1)]);
                let cd: Vec6 = std::array::from_fn(|k| 0.5 * (rgt[k] - lft[k]));
                let a = elastic_model::apply_a(&phi[j], params, &cd);
                for k in 0..6 {
                    let adv = a[k] - s * cd[k];
                    next[j][k] = phi[j][k] - r * adv + 0.5 * r * (diss[j + 1][k] - diss[j][k]);
                }
            }
            std::mem::swap(&mut phi, &mut next);
            t += dt;
            steps += 1;
            if phi.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
                return Err(OracleError::NotFinite { t });
            }
        }
        out.push(FvField { t, x0: x0 + s * t, dx, phi: phi.clone(), steps });
    }
    Ok(out)
}
