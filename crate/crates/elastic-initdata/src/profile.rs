use serde::{Deserialize, Serialize};

use crate::error::InitDataError;
use crate::quad;

/// ∫₋₁¹ exp(−1/(1−s²)) ds.
pub const MOLLIFIER_MASS: f64 = 0.443_993_816_168_079_4;

/// Left and right edges of the window where χ = 1, in units of η.
const CHI_LO: f64 = 1.2;
const CHI_HI: f64 = 1.8;
/// Mollifier half-width in units of η.
const MOLL: f64 = 0.1;
/// Bump centre and half-width in units of η.
const BUMP_CENTRE: f64 = 1.5;
const BUMP_HALF: f64 = 0.45;

/// One-dimensional profiles used as initial wave amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    Zero,
    /// Unit-mass bump supported on |x| ≤ η/10.
    Mollifier { eta: f64 },
    /// θ·(ζ ∗ |ln|^α χ)(z).
    Lindblad { eta: f64, theta: f64, alpha: f64 },
    /// amplitude·exp(1 − 1/(1 − s²)), s = (z − 1.5η)/(0.45η); peak value `amplitude`.
    Bump { eta: f64, amplitude: f64 },
}

fn bump_core(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

fn bump_core_deriv(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - s * s;
        bump_core(s) * (-2.0 * s / (t * t))
    }
}

fn zeta(x: f64, eta: f64) -> f64 {
    10.0 / (MOLLIFIER_MASS * eta) * bump_core(x / (MOLL * eta))
}

fn zeta_deriv(x: f64, eta: f64) -> f64 {
    let k = 1.0 / (MOLL * eta);
    10.0 / (MOLLIFIER_MASS * eta) * k * bump_core_deriv(x * k)
}

impl Profile {
    pub fn value(&self, z: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Mollifier { eta } => zeta(z, eta),
            Profile::Lindblad { eta, theta, alpha } => {
                theta * convolve(z, eta, alpha, |x| zeta(x, eta), 1e-12)
            }
            Profile::Bump { eta, amplitude } => {
                amplitude * std::f64::consts::E * bump_core((z - BUMP_CENTRE * eta) / (BUMP_HALF * eta))
            }
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Mollifier { eta } => zeta_deriv(z, eta),
            Profile::Lindblad { eta, theta, alpha } => {
                // Differentiating under the integral: the χ edges are fixed
                // in u and ζ vanishes at the moving ends.
                theta * convolve(z, eta, alpha, |x| zeta_deriv(x, eta), 1e-12 * 10.0 / eta)
            }
            Profile::Bump { eta, amplitude } => {
                let h = BUMP_HALF * eta;
                amplitude * std::f64::consts::E * bump_core_deriv((z - BUMP_CENTRE * eta) / h) / h
            }
        }
    }

    /// Closed interval outside which the profile vanishes.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile::Zero => (0.0, 0.0),
            Profile::Mollifier { eta } => (-MOLL * eta, MOLL * eta),
            Profile::Lindblad { eta, .. } => ((CHI_LO - MOLL) * eta, (CHI_HI + MOLL) * eta),
            Profile::Bump { eta, .. } => {
                ((BUMP_CENTRE - BUMP_HALF) * eta, (BUMP_CENTRE + BUMP_HALF) * eta)
            }
        }
    }

    /// Panel boundaries for integrating the profile: support ends plus the
    /// edges of the mollified χ transitions.
    pub fn breaks(&self) -> Vec<f64> {
        match *self {
            Profile::Zero => vec![0.0, 0.0],
            Profile::Mollifier { eta } => vec![-MOLL * eta, 0.0, MOLL * eta],
            Profile::Lindblad { eta, .. } => [1.1, 1.3, 1.7, 1.9].iter().map(|k| k * eta).collect(),
            Profile::Bump { eta, .. } => {
                let (a, b) = self.support();
                vec![a, BUMP_CENTRE * eta, b]
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Lindblad { theta, .. } => theta == 0.0,
            Profile::Bump { amplitude, .. } => amplitude == 0.0,
            Profile::Mollifier { .. } => false,
        }
    }
}

/// ∫ k(z − u)|ln u|^α du over u ∈ [1.2η, 1.8η] ∩ [z − η/10, z + η/10].
fn convolve<K: Fn(f64) -> f64>(z: f64, eta: f64, alpha: f64, kernel: K, tol: f64) -> f64 {
    let lo = (CHI_LO * eta).max(z - MOLL * eta);
    let hi = (CHI_HI * eta).min(z + MOLL * eta);
    if hi <= lo {
        return 0.0;
    }
    let mut f = |u: f64| kernel(z - u) * u.ln().abs().powf(alpha);
    if lo < z && z < hi {
        quad::adaptive(lo, z, &mut f, 0.5 * tol) + quad::adaptive(z, hi, &mut f, 0.5 * tol)
    } else {
        quad::adaptive(lo, hi, &mut f, tol)
    }
}

pub fn mollifier(eta: f64) -> Result<Profile, InitDataError> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(InitDataError::InvalidSpec(format!("eta must be positive, got {eta}")));
    }
    Ok(Profile::Mollifier { eta })
}

pub fn lindblad_profile(eta: f64, theta: f64, alpha: f64) -> Result<Profile, InitDataError> {
    mollifier(eta)?;
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(InitDataError::InvalidSpec(format!("theta must be >= 0, got {theta}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(InitDataError::InvalidSpec(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(Profile::Lindblad { eta, theta, alpha })
}
