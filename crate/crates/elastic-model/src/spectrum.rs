use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::params::{DimMode, MaterialParams};

pub type Vec6 = [f64; 6];

/// Below this transverse amplitude |(φ₂, φ₃)| the polarization direction is
/// taken from the reference instead of the state.
pub const DEGENERATE_TRANSVERSE: f64 = 1e-12;

/// 3D families (0-based) that survive in the 2D reduction, in 2D order.
pub const FAMILIES_2D: [usize; 4] = [0, 2, 3, 5];
/// 3D state slots holding the 2D unknowns (u¹ₓ, u²ₓ, u¹ₜ, u²ₜ).
pub const SLOTS_2D: [usize; 4] = [0, 1, 3, 4];

/// How the eigenvectors of the transverse families 2..5 are scaled.
///
/// `Natural` uses the raw polynomial formulas, which vanish with (φ₂, φ₃).
/// `UnitPolarization` divides those right vectors by the signed transverse
/// amplitude p = ê·(φ₂, φ₃), giving vectors that stay O(1) as p → 0. The two
/// agree up to that scalar, so wave amplitudes differ by the factor p while
/// densities and speeds are unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Natural,
    UnitPolarization,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxScalars {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub delta: f64,
}

/// Eigen-data in the embedded 6-component form.
#[derive(Debug, Clone, Copy)]
pub struct Frame6 {
    pub lambda: Vec6,
    pub r: [Vec6; 6],
    pub l: [Vec6; 6],
    pub k: f64,
    pub m: f64,
    pub n: f64,
    /// Unit transverse direction ê used for families 2..5.
    pub dir: [f64; 2],
    /// Signed transverse amplitude ê·(φ₂, φ₃).
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub lambdas: Vec<f64>,
    pub rights: Vec<Vec<f64>>,
    pub lefts: Vec<Vec<f64>>,
    pub k: f64,
    /// Normalizer of families 2 and 5; absent in 2D.
    pub m: Option<f64>,
    pub n: f64,
    pub direction_used: Option<[f64; 2]>,
    pub normalization: Normalization,
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Embeds an n-component state into the 6-component layout. 2D states occupy
/// slots (0, 1, 3, 4); the u³ slots are zero.
pub fn embed(state: &[f64], mode: DimMode) -> Vec6 {
    match mode {
        DimMode::Planar3D => [state[0], state[1], state[2], state[3], state[4], state[5]],
        DimMode::Planar2D => [state[0], state[1], 0.0, state[2], state[3], 0.0],
    }
}

fn check_state(state: &[f64], params: &MaterialParams) -> Result<Vec6, ModelError> {
    let n = params.n();
    if state.len() != n {
        return Err(ModelError::Dimension {
            expected: n,
            got: state.len(),
        });
    }
    let amp = norm(state);
    if !(amp <= params.ball_radius()) {
        return Err(ModelError::Amplitude {
            amplitude: amp,
            limit: params.ball_radius(),
        });
    }
    Ok(embed(state, params.dim_mode))
}

pub(crate) fn aux_scalars_unchecked(phi: &Vec6, p: &MaterialParams) -> AuxScalars {
    let a = p.c1 * p.c1 + 2.0 * p.sigma0 * phi[0];
    let b = p.c2 * p.c2 + 2.0 * p.sigma1 * phi[0];
    let c = 2.0 * p.sigma1 * phi[1];
    let d = 2.0 * p.sigma1 * phi[2];
    let delta = (a - b) * (a - b) + 4.0 * (c * c + d * d);
    AuxScalars { a, b, c, d, delta }
}

pub fn aux_scalars(state: &[f64], params: &MaterialParams) -> Result<AuxScalars, ModelError> {
    let phi = check_state(state, params)?;
    Ok(aux_scalars_unchecked(&phi, params))
}

/// A(Φ)·v using the sparsity of A.
#[inline]
pub fn apply_a(phi: &Vec6, params: &MaterialParams, v: &Vec6) -> Vec6 {
    let a = params.c1 * params.c1 + 2.0 * params.sigma0 * phi[0];
    let b = params.c2 * params.c2 + 2.0 * params.sigma1 * phi[0];
    let c = 2.0 * params.sigma1 * phi[1];
    let d = 2.0 * params.sigma1 * phi[2];
    [
        -v[3],
        -v[4],
        -v[5],
        -a * v[0] - c * v[1] - d * v[2],
        -c * v[0] - b * v[1],
        -d * v[0] - b * v[2],
    ]
}

/// Largest eigenvalue λ₁ (= −λ₆ = max |λ|).
#[inline]
pub fn lambda_max(phi: &Vec6, params: &MaterialParams) -> f64 {
    let s = aux_scalars_unchecked(phi, params);
    (0.5 * (s.a + s.b) + 0.5 * s.delta.sqrt()).sqrt()
}

fn full_matrix(phi: &Vec6, params: &MaterialParams) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(6, 6);
    for j in 0..6 {
        let mut e = [0.0; 6];
        e[j] = 1.0;
        let col = apply_a(phi, params, &e);
        for i in 0..6 {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// The n×n coefficient matrix of ∂ₜΦ + A(Φ)∂ₓΦ = 0.
pub fn coefficient_matrix(
    state: &[f64],
    params: &MaterialParams,
) -> Result<DMatrix<f64>, ModelError> {
    let phi = check_state(state, params)?;
    let full = full_matrix(&phi, params);
    Ok(match params.dim_mode {
        DimMode::Planar3D => full,
        DimMode::Planar2D => DMatrix::from_fn(4, 4, |i, j| full[(SLOTS_2D[i], SLOTS_2D[j])]),
    })
}

/// Eigen-data without amplitude checks. `reference` orients ê; it is also
/// the direction used when the transverse amplitude vanishes.
pub fn frame6(
    phi: &Vec6,
    params: &MaterialParams,
    normalization: Normalization,
    reference: [f64; 2],
) -> Frame6 {
    let s = aux_scalars_unchecked(phi, params);
    let sigma1 = params.sigma1;
    let amb = s.a - s.b;
    let q = s.c * s.c + s.d * s.d;
    let sqrt_delta = s.delta.sqrt();
    // sum = (a − b) + √Δ stays away from zero because a > b.
    let sum = amb + sqrt_delta;
    let lam1 = (s.a + 2.0 * q / sum).sqrt();
    let lam2 = s.b.sqrt();
    let lam3 = (s.b - 2.0 * q / sum).sqrt();

    let (t2, t3) = (phi[1], phi[2]);
    let tnorm = (t2 * t2 + t3 * t3).sqrt();
    let degenerate = tnorm < DEGENERATE_TRANSVERSE;
    let dir = if degenerate {
        reference
    } else {
        let (e2, e3) = (t2 / tnorm, t3 / tnorm);
        if e2 * reference[0] + e3 * reference[1] < 0.0 {
            [-e2, -e3]
        } else {
            [e2, e3]
        }
    };
    let p = dir[0] * t2 + dir[1] * t3;
    let (e2, e3) = (dir[0], dir[1]);

    let beta1 = sum / (4.0 * sigma1);
    let beta_hat = -4.0 * sigma1 * p / sum;
    let k = (s.delta + amb * sqrt_delta) / (4.0 * sigma1 * sigma1);
    let n_unit = 4.0 * sqrt_delta / sum;

    let mut r = [
        [beta1, t2, t3, -lam1 * beta1, -lam1 * t2, -lam1 * t3],
        [0.0, e3, -e2, 0.0, -lam2 * e3, lam2 * e2],
        [beta_hat, e2, e3, -lam3 * beta_hat, -lam3 * e2, -lam3 * e3],
        [beta_hat, e2, e3, lam3 * beta_hat, lam3 * e2, lam3 * e3],
        [0.0, e3, -e2, 0.0, lam2 * e3, -lam2 * e2],
        [beta1, t2, t3, lam1 * beta1, lam1 * t2, lam1 * t3],
    ];
    let mut l = [
        [beta1, t2, t3, -beta1 / lam1, -t2 / lam1, -t3 / lam1],
        [0.0, e3, -e2, 0.0, -e3 / lam2, e2 / lam2],
        [beta_hat, e2, e3, -beta_hat / lam3, -e2 / lam3, -e3 / lam3],
        [beta_hat, e2, e3, beta_hat / lam3, e2 / lam3, e3 / lam3],
        [0.0, e3, -e2, 0.0, e3 / lam2, -e2 / lam2],
        [beta1, t2, t3, beta1 / lam1, t2 / lam1, t3 / lam1],
    ];
    let inv = [1.0 / k, 0.5, 1.0 / n_unit, 1.0 / n_unit, 0.5, 1.0 / k];
    for (row, f) in l.iter_mut().zip(inv) {
        for x in row.iter_mut() {
            *x *= f;
        }
    }

    let (mut m, mut n) = (2.0, n_unit);
    if normalization == Normalization::Natural && !degenerate {
        for fam in 1..5 {
            for j in 0..6 {
                r[fam][j] *= p;
                l[fam][j] /= p;
            }
        }
        m = 2.0 * tnorm * tnorm;
        n = q * sqrt_delta / (sigma1 * sigma1 * sum);
    }

    Frame6 {
        lambda: [lam1, lam2, lam3, -lam3, -lam2, -lam1],
        r,
        l,
        k,
        m,
        n,
        dir,
        p,
    }
}

fn default_reference(mode: DimMode, prev: Option<[f64; 2]>) -> [f64; 2] {
    match mode {
        // The 2D transverse unknown is φ₂ alone; a fixed ê keeps the
        // normalized frame smooth through φ₂ = 0.
        DimMode::Planar2D => [1.0, 0.0],
        DimMode::Planar3D => prev.unwrap_or([0.0, 1.0]),
    }
}

/// Spectrum with the natural scaling of the transverse families.
pub fn spectrum(
    state: &[f64],
    params: &MaterialParams,
    prev_direction: Option<[f64; 2]>,
) -> Result<Spectrum, ModelError> {
    spectrum_with(state, params, prev_direction, Normalization::Natural)
}

pub fn spectrum_with(
    state: &[f64],
    params: &MaterialParams,
    prev_direction: Option<[f64; 2]>,
    normalization: Normalization,
) -> Result<Spectrum, ModelError> {
    let phi = check_state(state, params)?;
    let reference = default_reference(params.dim_mode, prev_direction);
    let f = frame6(&phi, params, normalization, reference);
    Ok(match params.dim_mode {
        DimMode::Planar3D => Spectrum {
            lambdas: f.lambda.to_vec(),
            rights: f.r.iter().map(|v| v.to_vec()).collect(),
            lefts: f.l.iter().map(|v| v.to_vec()).collect(),
            k: f.k,
            m: Some(f.m),
            n: f.n,
            direction_used: Some(f.dir),
            normalization,
        },
        DimMode::Planar2D => {
            let pick = |v: &Vec6| SLOTS_2D.iter().map(|&s| v[s]).collect::<Vec<_>>();
            Spectrum {
                lambdas: FAMILIES_2D.iter().map(|&i| f.lambda[i]).collect(),
                rights: FAMILIES_2D.iter().map(|&i| pick(&f.r[i])).collect(),
                lefts: FAMILIES_2D.iter().map(|&i| pick(&f.l[i])).collect(),
                k: f.k,
                m: None,
                n: f.n,
                direction_used: None,
                normalization,
            }
        }
    })
}

/// Closed-form ∇_Φλᵢ for all six families (rows), embedded layout.
pub fn grad_lambda6(phi: &Vec6, params: &MaterialParams) -> [Vec6; 6] {
    let s = aux_scalars_unchecked(phi, params);
    let (s0, s1) = (params.sigma0, params.sigma1);
    let amb = s.a - s.b;
    let q = s.c * s.c + s.d * s.d;
    let sd = s.delta.sqrt();
    let sum = amb + sd;
    let lam1 = (s.a + 2.0 * q / sum).sqrt();
    let lam2 = s.b.sqrt();
    let lam3 = (s.b - 2.0 * q / sum).sqrt();
    let g1 = [
        ((s0 + s1) * sd + amb * (s0 - s1)) / (2.0 * lam1 * sd),
        4.0 * s1 * s1 * phi[1] / (lam1 * sd),
        4.0 * s1 * s1 * phi[2] / (lam1 * sd),
        0.0,
        0.0,
        0.0,
    ];
    let g2 = [s1 / lam2, 0.0, 0.0, 0.0, 0.0, 0.0];
    let g3 = [
        ((s0 + s1) * sd - amb * (s0 - s1)) / (2.0 * lam3 * sd),
        -4.0 * s1 * s1 * phi[1] / (lam3 * sd),
        -4.0 * s1 * s1 * phi[2] / (lam3 * sd),
        0.0,
        0.0,
        0.0,
    ];
    let neg = |g: &Vec6| g.map(|x| -x);
    [g1, g2, g3, neg(&g3), neg(&g2), neg(&g1)]
}

/// ∇_Φλᵢ as n vectors of length n, in the family order of the mode.
pub fn grad_lambda(state: &[f64], params: &MaterialParams) -> Result<Vec<Vec<f64>>, ModelError> {
    let phi = check_state(state, params)?;
    let g = grad_lambda6(&phi, params);
    Ok(match params.dim_mode {
        DimMode::Planar3D => g.iter().map(|v| v.to_vec()).collect(),
        DimMode::Planar2D => FAMILIES_2D
            .iter()
            .map(|&i| SLOTS_2D.iter().map(|&s| g[i][s]).collect())
            .collect(),
    })
}
