use serde::{Deserialize, Serialize};

use crate::error::OracleError;

/// V = (φₜ, φₓ) of the scalar model and its Riemann invariants W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleWaveState {
    pub v1: f64,
    pub v2: f64,
    pub w1: f64,
    pub w2: f64,
}

impl SingleWaveState {
    pub fn from_v(v1: f64, v2: f64) -> Result<Self, OracleError> {
        let (w1, w2) = single_wave_invariants(v1, v2)?;
        Ok(SingleWaveState { v1, v2, w1, w2 })
    }
}

/// W₁ = V₁ − ((1+2V₂)^{3/2} − 1)/3, W₂ = V₁ + ((1+2V₂)^{3/2} − 1)/3.
pub fn single_wave_invariants(v1: f64, v2: f64) -> Result<(f64, f64), OracleError> {
    let base = 1.0 + 2.0 * v2;
    if !(base > 0.0) {
        return Err(OracleError::Vacuum(base));
    }
    let g = (base * base.sqrt() - 1.0) / 3.0;
    Ok((v1 - g, v1 + g))
}

/// Inverse of [`single_wave_invariants`].
pub fn single_wave_inverse(w1: f64, w2: f64) -> Result<(f64, f64), OracleError> {
    let cube = 1.0 + 1.5 * (w2 - w1);
    if !(cube > 0.0) {
        return Err(OracleError::Vacuum(cube));
    }
    let base = cube.powf(2.0 / 3.0);
    Ok((0.5 * (w1 + w2), 0.5 * (base - 1.0)))
}

/// λ₂ = √(1+2V₂) written in the invariants: (1 + 3(W₂−W₁)/2)^{1/3}.
pub fn lambda2(w1: f64, w2: f64) -> f64 {
    (1.0 + 1.5 * (w2 - w1)).cbrt()
}

/// ∂λ₂/∂W₁ (negative).
pub fn dlambda2_dw1(w1: f64, w2: f64) -> f64 {
    let l = lambda2(w1, w2);
    -0.5 / (l * l)
}

/// ∂λ₂/∂W₂.
pub fn dlambda2_dw2(w1: f64, w2: f64) -> f64 {
    -dlambda2_dw1(w1, w2)
}

/// Simple wave: one invariant is the constant `fixed`, the other is carried
/// from `profile` along straight characteristics. With `family == 2` the
/// profile is W₁ and rides the 2-characteristics x = y + λ₂(W₁⁰(y), fixed)·t;
/// with `family == 1` it is W₂ on x = y − λ₂(fixed, W₂⁰(y))·t.
pub struct SimpleWave<F: Fn(f64) -> f64> {
    pub family: u8,
    pub profile: F,
    pub fixed: f64,
}

impl<F: Fn(f64) -> f64> SimpleWave<F> {
    pub fn speed_of_label(&self, y: f64) -> f64 {
        let p = (self.profile)(y);
        if self.family == 2 {
            lambda2(p, self.fixed)
        } else {
            -lambda2(self.fixed, p)
        }
    }

    /// W at label y.
    pub fn invariants_of_label(&self, y: f64) -> (f64, f64) {
        let p = (self.profile)(y);
        if self.family == 2 {
            (p, self.fixed)
        } else {
            (self.fixed, p)
        }
    }

    /// Label of the straight characteristic through (x, t), by bisection
    /// given (min, max) bounds on its speed. Assumes no crossing yet.
    pub fn label(&self, x: f64, t: f64, speed_bounds: (f64, f64)) -> f64 {
        let g = |y: f64| y + self.speed_of_label(y) * t - x;
        let (mut lo, mut hi) = (x - speed_bounds.1 * t - 1e-12, x - speed_bounds.0 * t + 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// V(x, t).
    pub fn state(&self, x: f64, t: f64, speed_bounds: (f64, f64)) -> Result<(f64, f64), OracleError> {
        let (w1, w2) = self.invariants_of_label(self.label(x, t, speed_bounds));
        single_wave_inverse(w1, w2)
    }
}

/// Traces a characteristic of family `family` (1: speed −√(1+2V₂), 2:
/// +√(1+2V₂)) through the field `v(x, t)` with RK4 steps of `dt`.
pub fn trace_characteristic<V: Fn(f64, f64) -> (f64, f64)>(
    v: V,
    family: u8,
    x0: f64,
    t_end: f64,
    dt: f64,
) -> Vec<(f64, f64)> {
    let sign = if family == 1 { -1.0 } else { 1.0 };
    let speed = |x: f64, t: f64| sign * (1.0 + 2.0 * v(x, t).1).sqrt();
    let steps = (t_end / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let (mut x, mut t) = (x0, 0.0);
    out.push((t, x));
    for _ in 0..steps {
        let k1 = speed(x, t);
        let k2 = speed(x + 0.5 * dt * k1, t + 0.5 * dt);
        let k3 = speed(x + 0.5 * dt * k2, t + 0.5 * dt);
        let k4 = speed(x + dt * k3, t + dt);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        out.push((t, x));
    }
    out
}
