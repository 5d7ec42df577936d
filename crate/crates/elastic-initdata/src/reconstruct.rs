use elastic_model::{frame6, norm, DimMode, MaterialParams, Normalization, Vec6, FAMILIES_2D};
use serde::{Deserialize, Serialize};

use crate::error::InitDataError;
use crate::profile::Profile;

/// RK4 sub-steps per grid interval.
const SUBSTEPS: usize = 8;
/// Consistency tolerance relative to W₀.
const CONSISTENCY: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub x: Vec<f64>,
    /// Φ(x, 0) in the embedded 6-component layout.
    pub phi: Vec<Vec6>,
    /// max over families and fine points of |lⁱ·∂ₓΦ − wⁱ|.
    pub residual: f64,
    pub max_amplitude: f64,
    /// Φ at the right end of the grid; generically nonzero.
    pub tail: Vec6,
}

/// Embedded family index of each profile in mode order.
fn families(mode: DimMode) -> Vec<usize> {
    match mode {
        DimMode::Planar3D => (0..6).collect(),
        DimMode::Planar2D => FAMILIES_2D.to_vec(),
    }
}

fn reference(mode: DimMode) -> [f64; 2] {
    match mode {
        DimMode::Planar3D => [0.0, 1.0],
        DimMode::Planar2D => [1.0, 0.0],
    }
}

/// Integrates dΦ/dx = Σₖ wᵏ(x) r_k(Φ) from Φ = 0 at the left end of a
/// uniform grid (unit-polarization frame, orientation carried along x),
/// then checks lⁱ(Φ)·∂ₓΦ = wⁱ with a fourth-order difference on the RK4
/// sub-grid.
pub fn reconstruct_phi0(
    profiles: &[Profile],
    params: &MaterialParams,
    grid: &[f64],
) -> Result<Reconstruction, InitDataError> {
    let mode = params.dim_mode;
    let fams = families(mode);
    if profiles.len() != fams.len() {
        return Err(InitDataError::Grid(format!(
            "expected {} profiles, got {}",
            fams.len(),
            profiles.len()
        )));
    }
    if grid.len() < 3 {
        return Err(InitDataError::Grid("need at least 3 grid points".into()));
    }
    let dx = grid[1] - grid[0];
    if !(dx > 0.0) || grid.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx) {
        return Err(InitDataError::Grid("grid must be uniform and increasing".into()));
    }
    for p in profiles {
        let (a, b) = p.support();
        if !p.is_zero() && (a < grid[0] || b > grid[grid.len() - 1]) {
            return Err(InitDataError::Grid("grid does not cover the data support".into()));
        }
    }

    let h = dx / SUBSTEPS as f64;
    let nfine = (grid.len() - 1) * SUBSTEPS + 1;
    let xf = |q: usize| grid[0] + q as f64 * h;
    // w at fine points and at sub-step midpoints (index 2q and 2q + 1).
    let wtab: Vec<[f64; 6]> = (0..2 * nfine - 1)
        .map(|j| {
            let x = grid[0] + 0.5 * j as f64 * h;
            let mut w = [0.0; 6];
            for (p, &f) in profiles.iter().zip(&fams) {
                w[f] = p.value(x);
            }
            w
        })
        .collect();
    let w0 = wtab.iter().flat_map(|w| w.iter()).fold(0.0f64, |m, v| m.max(v.abs()));

    let mut dir = reference(mode);
    let radius = params.ball_radius();
    let rhs = |phi: &Vec6, w: &[f64; 6], dir: [f64; 2]| -> (Vec6, [f64; 2]) {
        let f = frame6(phi, params, Normalization::UnitPolarization, dir);
        let mut out = [0.0; 6];
        for k in 0..6 {
            if w[k] != 0.0 {
                for j in 0..6 {
                    out[j] += w[k] * f.r[k][j];
                }
            }
        }
        (out, f.dir)
    };
    let add = |a: &Vec6, t: f64, b: &Vec6| -> Vec6 { std::array::from_fn(|j| a[j] + t * b[j]) };

    let mut fine = vec![[0.0; 6]; nfine];
    let mut max_amp = 0.0f64;
    for q in 0..nfine - 1 {
        let y = fine[q];
        let (wa, wm, wb) = (&wtab[2 * q], &wtab[2 * q + 1], &wtab[2 * q + 2]);
        let (k1, d1) = rhs(&y, wa, dir);
        let (k2, _) = rhs(&add(&y, 0.5 * h, &k1), wm, d1);
        let (k3, _) = rhs(&add(&y, 0.5 * h, &k2), wm, d1);
        let (k4, _) = rhs(&add(&y, h, &k3), wb, d1);
        dir = d1;
        let next: Vec6 = std::array::from_fn(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        let amp = norm(&next);
        if !(amp <= radius) {
            return Err(InitDataError::AmplitudeExit { x: xf(q + 1), amplitude: amp, limit: radius });
        }
        max_amp = max_amp.max(amp);
        fine[q + 1] = next;
    }

    // Consistency of the decomposition on the sub-grid.
    let mut residual = 0.0f64;
    let mut dir = reference(mode);
    for q in 2..nfine - 2 {
        let d: Vec6 = std::array::from_fn(|j| {
            (-fine[q + 2][j] + 8.0 * fine[q + 1][j] - 8.0 * fine[q - 1][j] + fine[q - 2][j]) / (12.0 * h)
        });
        let f = frame6(&fine[q], params, Normalization::UnitPolarization, dir);
        dir = f.dir;
        for &k in &fams {
            let lw: f64 = (0..6).map(|j| f.l[k][j] * d[j]).sum();
            residual = residual.max((lw - wtab[2 * q][k]).abs());
        }
    }
    let limit = CONSISTENCY * w0;
    if w0 > 0.0 && !(residual < limit) {
        return Err(InitDataError::Consistency { residual, limit });
    }
    let phi: Vec<Vec6> = (0..grid.len()).map(|j| fine[j * SUBSTEPS]).collect();
    let tail = phi[phi.len() - 1];
    Ok(Reconstruction {
        x: grid.to_vec(),
        phi,
        residual,
        max_amplitude: max_amp,
        tail,
    })
}
