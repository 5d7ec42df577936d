use elastic_model::{
    embed, frame6, grad_lambda6, norm, DimMode, Frame6, MaterialParams, ModelError, Normalization,
    Vec6, FAMILIES_2D, SLOTS_2D,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Finite-difference step relative to max(1, |Φ|).
pub const FD_RELATIVE_STEP: f64 = 1e-6;

/// Transverse amplitude below which the families 2 and 5 vectors are not
/// differentiable in the natural scaling.
const GRAD_DEGENERATE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("family index {family} out of range for n = {n}")]
    Family { family: usize, n: usize },
    #[error(
        "eigenvector of family {family} is not differentiable at |(phi2, phi3)| = {transverse:e} \
         (needs > 1e-8); use the regularized products"
    )]
    Degenerate { family: usize, transverse: f64 },
    #[error(
        "sign convention c11 < 0 on the amplitude ball is violated: c11 = {c11:e} at {state:?}; \
         flip the sign of sigma0 or reduce delta"
    )]
    SignConvention { c11: f64, state: Vec<f64> },
}

/// Coefficients in the embedded 6-family layout. Indices are 0-based:
/// `c[i][m]` = ∇λᵢ·r_m and `gamma[i][k][m]` = γᵢ with lower indices (k, m).
#[derive(Debug, Clone)]
pub struct Table6 {
    pub frame: Frame6,
    pub c: [[f64; 6]; 6],
    pub gamma: [[[f64; 6]; 6]; 6],
}

/// Coupling coefficients in the family order of the mode (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub c: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub at_state: Vec<f64>,
    pub normalization: Normalization,
    /// True when the state lies in the strip |(φ₂, φ₃)| ≤ 1e−8 of a 3D run.
    /// Entries built from transverse derivatives of families 2..5 then
    /// depend on the chosen polarization chart.
    pub degenerate: bool,
}

fn axpy(phi: &Vec6, t: f64, v: &Vec6) -> Vec6 {
    std::array::from_fn(|j| phi[j] + t * v[j])
}

fn dot(a: &Vec6, b: &Vec6) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn fd_scale(phi: &Vec6) -> f64 {
    FD_RELATIVE_STEP * norm(phi).max(1.0)
}

/// Displacement length for a difference quotient at `phi`: the relative
/// step, shortened so that no stencil point reaches the transverse axis.
fn displacement(phi: &Vec6) -> f64 {
    let tn = phi[1].hypot(phi[2]);
    let h = fd_scale(phi);
    if tn > GRAD_DEGENERATE {
        h.min(0.25 * tn)
    } else {
        h
    }
}

/// Richardson-extrapolated central difference of all six right vectors
/// along `v`, with the polarization oriented like the centre frame.
fn diff_along<F>(eval: F, phi: &Vec6, v: &Vec6, disp: f64) -> [Vec6; 6]
where
    F: Fn(&Vec6) -> [Vec6; 6],
{
    let vn = norm(v);
    if vn == 0.0 {
        return [[0.0; 6]; 6];
    }
    let h = disp / vn;
    let p1 = eval(&axpy(phi, h, v));
    let m1 = eval(&axpy(phi, -h, v));
    let p2 = eval(&axpy(phi, 0.5 * h, v));
    let m2 = eval(&axpy(phi, -0.5 * h, v));
    std::array::from_fn(|k| {
        std::array::from_fn(|j| {
            let coarse = (p1[k][j] - m1[k][j]) / (2.0 * h);
            let fine = (p2[k][j] - m2[k][j]) / h;
            (4.0 * fine - coarse) / 3.0
        })
    })
}

/// `d[k][m]` = (∇r_k)·r_m for every direction m with `active[m]`; inactive
/// directions are left zero.
pub fn directional_derivatives(
    phi: &Vec6,
    params: &MaterialParams,
    normalization: Normalization,
    reference: [f64; 2],
    active: [bool; 6],
) -> (Frame6, [[Vec6; 6]; 6]) {
    let centre = frame6(phi, params, normalization, reference);
    let orient = centre.dir;
    let eval = |x: &Vec6| frame6(x, params, normalization, orient).r;
    let disp = displacement(phi);
    let mut d = [[[0.0; 6]; 6]; 6];
    for m in 0..6 {
        if !active[m] {
            continue;
        }
        let col = diff_along(eval, phi, &centre.r[m], disp);
        for k in 0..6 {
            d[k][m] = col[k];
        }
    }
    (centre, d)
}

/// Full 6-family table; γ entries needing an inactive direction are zero.
pub fn table6(
    phi: &Vec6,
    params: &MaterialParams,
    normalization: Normalization,
    reference: [f64; 2],
    active: [bool; 6],
) -> Table6 {
    let (frame, d) = directional_derivatives(phi, params, normalization, reference, active);
    let grad = grad_lambda6(phi, params);
    let c: [[f64; 6]; 6] = std::array::from_fn(|i| std::array::from_fn(|m| dot(&grad[i], &frame.r[m])));
    let lam = frame.lambda;
    let mut gamma = [[[0.0; 6]; 6]; 6];
    for i in 0..6 {
        for k in 0..6 {
            for m in 0..6 {
                if k == m || !active[m] {
                    continue;
                }
                gamma[i][k][m] = if k == i {
                    if !active[i] {
                        continue;
                    }
                    let diff: Vec6 = std::array::from_fn(|j| d[i][m][j] - d[m][i][j]);
                    -(lam[i] - lam[m]) * dot(&frame.l[i], &diff)
                } else {
                    -(lam[k] - lam[m]) * dot(&frame.l[i], &d[k][m])
                };
            }
        }
    }
    Table6 { frame, c, gamma }
}

fn check_embed(state: &[f64], params: &MaterialParams) -> Result<Vec6, CouplingError> {
    // aux_scalars performs the dimension and amplitude checks.
    elastic_model::aux_scalars(state, params)?;
    Ok(embed(state, params.dim_mode))
}

fn default_reference(mode: DimMode, prev: Option<[f64; 2]>) -> [f64; 2] {
    match mode {
        DimMode::Planar2D => [1.0, 0.0],
        DimMode::Planar3D => prev.unwrap_or([0.0, 1.0]),
    }
}

/// Coupling table in the natural scaling. Inside the degenerate strip of a 3D
/// run the naturally scaled vectors of families 2..5 vanish, so the unit-polarization
/// frame is used there and `degenerate` is set.
pub fn coupling_table(state: &[f64], params: &MaterialParams) -> Result<CouplingTable, CouplingError> {
    let phi = check_embed(state, params)?;
    let tn = phi[1].hypot(phi[2]);
    let normalization = if params.dim_mode == DimMode::Planar3D && tn <= GRAD_DEGENERATE {
        Normalization::UnitPolarization
    } else {
        Normalization::Natural
    };
    coupling_table_with(state, params, normalization, None)
}

pub fn coupling_table_with(
    state: &[f64],
    params: &MaterialParams,
    normalization: Normalization,
    prev_direction: Option<[f64; 2]>,
) -> Result<CouplingTable, CouplingError> {
    let phi = check_embed(state, params)?;
    let reference = default_reference(params.dim_mode, prev_direction);
    let t = table6(&phi, params, normalization, reference, [true; 6]);
    let fams: Vec<usize> = match params.dim_mode {
        DimMode::Planar3D => (0..6).collect(),
        DimMode::Planar2D => FAMILIES_2D.to_vec(),
    };
    let c = fams.iter().map(|&i| fams.iter().map(|&m| t.c[i][m]).collect()).collect();
    let gamma = fams
        .iter()
        .map(|&i| {
            fams.iter()
                .map(|&k| fams.iter().map(|&m| t.gamma[i][k][m]).collect())
                .collect()
        })
        .collect();
    Ok(CouplingTable {
        c,
        gamma,
        at_state: state.to_vec(),
        normalization,
        degenerate: params.dim_mode == DimMode::Planar3D && phi[1].hypot(phi[2]) <= GRAD_DEGENERATE,
    })
}

fn family_3d(k: usize, params: &MaterialParams) -> Result<usize, CouplingError> {
    let n = params.n();
    if k >= n {
        return Err(CouplingError::Family { family: k, n });
    }
    Ok(match params.dim_mode {
        DimMode::Planar3D => k,
        DimMode::Planar2D => FAMILIES_2D[k],
    })
}

fn slots(params: &MaterialParams) -> Vec<usize> {
    match params.dim_mode {
        DimMode::Planar3D => (0..6).collect(),
        DimMode::Planar2D => SLOTS_2D.to_vec(),
    }
}

/// ∇_Φ r_k (0-based family k, natural scaling) by central differences with
/// one Richardson level; entry (row, col) = ∂r_k[row]/∂φ_col.
pub fn grad_eigenvector(
    state: &[f64],
    params: &MaterialParams,
    k: usize,
) -> Result<DMatrix<f64>, CouplingError> {
    let phi = check_embed(state, params)?;
    let k3 = family_3d(k, params)?;
    let tn = phi[1].hypot(phi[2]);
    if params.dim_mode == DimMode::Planar3D && (k3 == 1 || k3 == 4) && tn <= GRAD_DEGENERATE {
        return Err(CouplingError::Degenerate { family: k, transverse: tn });
    }
    let reference = default_reference(params.dim_mode, None);
    let orient = frame6(&phi, params, Normalization::Natural, reference).dir;
    let eval = |x: &Vec6| frame6(x, params, Normalization::Natural, orient).r;
    let disp = displacement(&phi);
    let sl = slots(params);
    let n = sl.len();
    let mut jac = DMatrix::zeros(n, n);
    for (col, &s) in sl.iter().enumerate() {
        let mut e = [0.0; 6];
        e[s] = 1.0;
        let d = diff_along(eval, &phi, &e, disp);
        for (row, &t) in sl.iter().enumerate() {
            jac[(row, col)] = d[k3][t];
        }
    }
    Ok(jac)
}

/// Chain-rule derivative of the naturally scaled r_k (3D families 1..4,
/// 0-based) along v. Valid off the transverse axis.
fn analytic_grad_dot(phi: &Vec6, params: &MaterialParams, k: usize, v: &Vec6) -> Vec6 {
    let (s0, s1) = (params.sigma0, params.sigma1);
    let a = params.c1 * params.c1 + 2.0 * s0 * phi[0];
    let b = params.c2 * params.c2 + 2.0 * s1 * phi[0];
    let c = 2.0 * s1 * phi[1];
    let d = 2.0 * s1 * phi[2];
    let amb = a - b;
    let delta = amb * amb + 4.0 * (c * c + d * d);
    let sd = delta.sqrt();
    let sum = amb + sd;
    let q = c * c + d * d;
    let lam2 = b.sqrt();
    let lam3 = (b - 2.0 * q / sum).sqrt();

    let d_amb = 2.0 * (s0 - s1) * v[0];
    let d_delta = 2.0 * amb * d_amb + 8.0 * (c * 2.0 * s1 * v[1] + d * 2.0 * s1 * v[2]);
    let d_sum = d_amb + d_delta / (2.0 * sd);
    let t2 = phi[1] * phi[1] + phi[2] * phi[2];
    let d_t2 = 2.0 * (phi[1] * v[1] + phi[2] * v[2]);
    let beta = -4.0 * s1 * t2 / sum;
    let d_beta = -4.0 * s1 * d_t2 / sum + 4.0 * s1 * t2 * d_sum / (sum * sum);
    let d_lam2 = s1 * v[0] / lam2;
    let d_lam3 = dot(&grad_lambda6(phi, params)[2], v);

    match k {
        1 | 4 => {
            let sg = if k == 1 { -1.0 } else { 1.0 };
            [
                0.0,
                v[2],
                -v[1],
                0.0,
                sg * (d_lam2 * phi[2] + lam2 * v[2]),
                -sg * (d_lam2 * phi[1] + lam2 * v[1]),
            ]
        }
        2 | 3 => {
            let sg = if k == 2 { -1.0 } else { 1.0 };
            [
                d_beta,
                v[1],
                v[2],
                sg * (d_lam3 * beta + lam3 * d_beta),
                sg * (d_lam3 * phi[1] + lam3 * v[1]),
                sg * (d_lam3 * phi[2] + lam3 * v[2]),
            ]
        }
        _ => unreachable!("analytic derivative only for the transverse families"),
    }
}

/// Analytic ∇_Φ r_k for the transverse 3D families k ∈ {1, 2, 3, 4}
/// (0-based), natural scaling. Cross-check for [`grad_eigenvector`].
pub fn grad_eigenvector_analytic(
    state: &[f64],
    params: &MaterialParams,
    k: usize,
) -> Result<DMatrix<f64>, CouplingError> {
    let phi = check_embed(state, params)?;
    let k3 = family_3d(k, params)?;
    if !(1..=4).contains(&k3) {
        return Err(CouplingError::Family { family: k, n: params.n() });
    }
    let sl = slots(params);
    let n = sl.len();
    let mut jac = DMatrix::zeros(n, n);
    for (col, &s) in sl.iter().enumerate() {
        let mut e = [0.0; 6];
        e[s] = 1.0;
        let d = analytic_grad_dot(&phi, params, k3, &e);
        for (row, &t) in sl.iter().enumerate() {
            jac[(row, col)] = d[t];
        }
    }
    Ok(jac)
}

/// Analytic (∇r₂)·r₃, (∇r₃)·r₂, (∇r₄)·r₅, (∇r₅)·r₄ in the natural scaling
/// (3D, 1-based family names).
pub fn analytic_transverse_products(
    state: &[f64],
    params: &MaterialParams,
) -> Result<[Vec6; 4], CouplingError> {
    let phi = check_embed(state, params)?;
    if params.dim_mode != DimMode::Planar3D {
        return Err(CouplingError::Family { family: 4, n: params.n() });
    }
    let f = frame6(&phi, params, Normalization::Natural, [0.0, 1.0]);
    Ok([
        analytic_grad_dot(&phi, params, 1, &f.r[2]),
        analytic_grad_dot(&phi, params, 2, &f.r[1]),
        analytic_grad_dot(&phi, params, 3, &f.r[4]),
        analytic_grad_dot(&phi, params, 4, &f.r[3]),
    ])
}
