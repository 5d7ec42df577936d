use elastic_model::{
    embed, frame6, sample_ball, DimMode, MaterialParams, Normalization, FAMILIES_2D,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;

const GAP_SAMPLES: usize = 20_000;

/// Families grouped by strip: {1}, {2,3}, {4,5}, {6} (embedded indices),
/// restricted to the families of the mode.
pub fn strip_groups(mode: DimMode) -> Vec<Vec<usize>> {
    match mode {
        DimMode::Planar3D => vec![vec![0], vec![1, 2], vec![3, 4], vec![5]],
        DimMode::Planar2D => FAMILIES_2D.iter().map(|&f| vec![f]).collect(),
    }
}

/// Smallest speed gap between neighbouring strip groups over the ball.
pub fn strip_gap(params: &MaterialParams) -> f64 {
    let groups = strip_groups(params.dim_mode);
    let mut lo = vec![f64::INFINITY; groups.len()];
    let mut hi = vec![f64::NEG_INFINITY; groups.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a9);
    let n = params.n();
    for k in 0..=GAP_SAMPLES {
        let s = if k == 0 {
            vec![0.0; n]
        } else {
            sample_ball(&mut rng, n, params.ball_radius())
        };
        let f = frame6(&embed(&s, params.dim_mode), params, Normalization::UnitPolarization, [0.0, 1.0]);
        for (g, fams) in groups.iter().enumerate() {
            for &i in fams {
                lo[g] = lo[g].min(f.lambda[i]);
                hi[g] = hi[g].max(f.lambda[i]);
            }
        }
    }
    (0..groups.len() - 1).map(|g| lo[g] - hi[g + 1]).fold(f64::INFINITY, f64::min)
}

/// t₀ = η/σ, after which the strips of different groups are disjoint.
pub fn separation_time(eta: f64, params: &MaterialParams) -> Result<f64, SolverError> {
    let sigma = strip_gap(params);
    if !(sigma > 0.0) {
        return Err(SolverError::NoSeparation(sigma));
    }
    Ok(eta / sigma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaRegion {
    pub center: Vec<f64>,
    pub semi_axes: Vec<f64>,
    /// Volume (3D) or area (2D).
    pub measure: f64,
}

/// Ellipsoid swept by the data ball at T*: centre (c₁T* + 3η/2, 0, …),
/// semi-axes η/2 along x and c₂η/(2c₁) transversally.
pub fn omega_region(t_star: f64, eta: f64, params: &MaterialParams) -> OmegaRegion {
    let ax = eta / 2.0;
    let tr = params.c2 * eta / (2.0 * params.c1);
    let cx = params.c1 * t_star + 1.5 * eta;
    match params.dim_mode {
        DimMode::Planar3D => OmegaRegion {
            center: vec![cx, 0.0, 0.0],
            semi_axes: vec![ax, tr, tr],
            measure: 4.0 / 3.0 * std::f64::consts::PI * ax * tr * tr,
        },
        DimMode::Planar2D => OmegaRegion {
            center: vec![cx, 0.0],
            semi_axes: vec![ax, tr],
            measure: std::f64::consts::PI * ax * tr,
        },
    }
}

/// Transverse chord weight √((z − η)(2η − z)) of the 2D disc section.
pub fn section_weight_2d(z: f64, eta: f64) -> f64 {
    ((z - eta) * (2.0 * eta - z)).max(0.0).sqrt()
}
