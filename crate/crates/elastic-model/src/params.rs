use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::sampling::sample_ball;
use crate::spectrum::{aux_scalars_unchecked, embed, frame6, Normalization};

/// Planar reduction: three displacement components (n = 6) or two (n = 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimMode {
    Planar3D,
    Planar2D,
}

impl DimMode {
    pub fn n(self) -> usize {
        match self {
            DimMode::Planar3D => 6,
            DimMode::Planar2D => 4,
        }
    }
}

/// Taylor coefficients of the stored energy density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoredEnergyCoeffs {
    pub gamma11: f64,
    pub gamma2: f64,
    pub gamma111: f64,
    pub gamma12: f64,
    pub gamma3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub c1: f64,
    pub c2: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub sigma4: f64,
    pub dim_mode: DimMode,
    /// Amplitude scale; spectral operations accept |Φ| ≤ 2·delta.
    pub delta: f64,
}

/// Samples used to confirm the eigenvalue ordering over the amplitude ball.
const ORDERING_SAMPLES: usize = 2000;

impl MaterialParams {
    /// Validated parameters with σ₂ = σ₃ = σ₄ = 0 (they do not enter the
    /// planar reduction).
    pub fn new(
        c1: f64,
        c2: f64,
        sigma0: f64,
        sigma1: f64,
        dim_mode: DimMode,
        delta: f64,
    ) -> Result<Self, ModelError> {
        Self::with_all(c1, c2, [sigma0, sigma1, 0.0, 0.0, 0.0], dim_mode, delta)
    }

    pub fn with_all(
        c1: f64,
        c2: f64,
        sigma: [f64; 5],
        dim_mode: DimMode,
        delta: f64,
    ) -> Result<Self, ModelError> {
        let p = MaterialParams {
            c1,
            c2,
            sigma0: sigma[0],
            sigma1: sigma[1],
            sigma2: sigma[2],
            sigma3: sigma[3],
            sigma4: sigma[4],
            dim_mode,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// c₁ = 2, c₂ = 1, σ₀ = −1, σ₁ = 1, δ = 1e−2.
    pub fn desk_default(dim_mode: DimMode) -> Self {
        Self::new(2.0, 1.0, -1.0, 1.0, dim_mode, 1e-2).expect("default material is valid")
    }

    pub fn n(&self) -> usize {
        self.dim_mode.n()
    }

    /// Radius of the ball on which spectral operations are defined.
    pub fn ball_radius(&self) -> f64 {
        2.0 * self.delta
    }

    /// Closed form of c₁₁¹ at Φ = 0.
    pub fn c11_at_zero(&self) -> f64 {
        self.sigma0 * (self.c1 * self.c1 - self.c2 * self.c2) / (2.0 * self.sigma1 * self.c1)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [self.c1, self.c2, self.sigma0, self.sigma1, self.delta]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(ModelError::InvalidParams("non-finite value".into()));
        }
        if !(self.c2 > 0.0 && self.c1 > self.c2) {
            return Err(ModelError::InvalidParams(format!(
                "wave speeds must satisfy c1 > c2 > 0 (c1 = {}, c2 = {})",
                self.c1, self.c2
            )));
        }
        if self.sigma0 * self.sigma1 == 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "sigma0*sigma1 must be nonzero (sigma0 = {}, sigma1 = {})",
                self.sigma0, self.sigma1
            )));
        }
        if !(self.delta > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        self.check_ordering_on_ball()
    }

    /// a > b > 0 and the eigenvalue ordering, sampled over |Φ| < 2δ.
    fn check_ordering_on_ball(&self) -> Result<(), ModelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let n = self.n();
        let mut states: Vec<Vec<f64>> = vec![vec![0.0; n]];
        for _ in 0..ORDERING_SAMPLES {
            states.push(sample_ball(&mut rng, n, self.ball_radius()));
        }
        let reference = match self.dim_mode {
            DimMode::Planar3D => [0.0, 1.0],
            DimMode::Planar2D => [1.0, 0.0],
        };
        for s in &states {
            let phi = embed(s, self.dim_mode);
            let aux = aux_scalars_unchecked(&phi, self);
            if !(aux.a > aux.b && aux.b > 0.0) {
                return Err(ModelError::InvalidParams(format!(
                    "a > b > 0 fails inside the amplitude ball (a = {}, b = {}); reduce delta",
                    aux.a, aux.b
                )));
            }
            let f = frame6(&phi, self, Normalization::UnitPolarization, reference);
            let l = f.lambda;
            let ok = l[5] < l[4] && l[4] <= l[3] && l[3] < 0.0 && 0.0 < l[2] && l[2] <= l[1]
                && l[1] < l[0];
            if !ok {
                return Err(ModelError::InvalidParams(format!(
                    "eigenvalue ordering fails inside the amplitude ball: {l:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Material constants from the stored-energy coefficients.
pub fn sigma_from_gamma(
    coeffs: &StoredEnergyCoeffs,
    dim_mode: DimMode,
    delta: f64,
) -> Result<MaterialParams, ModelError> {
    let g = coeffs;
    if !(g.gamma2 < 0.0 && 2.0 * g.gamma11 + g.gamma2 > 0.0) {
        return Err(ModelError::InvalidParams(format!(
            "Lame positivity requires gamma2 < 0 and 2*gamma11 + gamma2 > 0 \
             (gamma11 = {}, gamma2 = {})",
            g.gamma11, g.gamma2
        )));
    }
    let c1 = 2.0 * g.gamma11.sqrt();
    let c2 = (-2.0 * g.gamma2).sqrt();
    let sigma = [
        2.0 * (2.0 * g.gamma111 + 3.0 * g.gamma11),
        2.0 * (g.gamma11 - g.gamma12),
        2.0 * (g.gamma2 - g.gamma3),
        2.0 * g.gamma3,
        4.0 * (g.gamma11 - 2.0 * g.gamma12),
    ];
    MaterialParams::with_all(c1, c2, sigma, dim_mode, delta)
}
