use serde::{Deserialize, Serialize};

use crate::charnet::CharPath;
use crate::error::OracleError;
use crate::single_wave::{dlambda2_dw1, dlambda2_dw2, lambda2};

/// Gauss–Legendre nodes/weights on [−1, 1], 8 points.
const GL_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

fn gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for k in 0..4 {
        s += GL_W[k] * (f(c - h * GL_X[k]) + f(c + h * GL_X[k]));
    }
    s * h
}

/// W₂ along one 2-characteristic as a function of t: piecewise cubic through
/// the path knots, each interval using its four nearest knots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct W2Path {
    pub w1: f64,
    pub t: Vec<f64>,
    pub w2: Vec<f64>,
    /// ∫₀^{t_k} e^{−I} ∂λ₂/∂W₁ dτ at each knot.
    cumulative: Vec<f64>,
}

impl W2Path {
    pub fn from_path(p: &CharPath) -> Result<Self, OracleError> {
        Self::new(p.w1, p.t.clone(), p.w2.clone())
    }

    pub fn new(w1: f64, t: Vec<f64>, w2: Vec<f64>) -> Result<Self, OracleError> {
        if t.len() != w2.len() || t.len() < 4 {
            return Err(OracleError::Invalid("path needs at least 4 matching knots".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(OracleError::Invalid("path times must increase".into()));
        }
        Ok(W2Path::tabulate(w1, t, w2))
    }

    fn tabulate(w1: f64, t: Vec<f64>, w2: Vec<f64>) -> Self {
        let mut p = W2Path { w1, t, w2, cumulative: vec![0.0] };
        let mut acc = 0.0;
        for k in 0..p.t.len() - 1 {
            acc += p.piece_integral(k, p.t[k + 1]);
            p.cumulative.push(acc);
        }
        p
    }

    /// ∫ from t_k to `upto` of e^{−I} ∂λ₂/∂W₁ on piece k.
    fn piece_integral(&self, k: usize, upto: f64) -> f64 {
        let w20 = self.w2[0];
        gauss(
            |s| {
                let (w2, _) = self.eval_in(k, s);
                (-i_of_w2(self.w1, w20, w2)).exp() * dlambda2_dw1(self.w1, w2)
            },
            self.t[k],
            upto,
        )
    }

    /// ∫₀ᵗ e^{−I} ∂λ₂/∂W₁ dτ.
    fn weighted_integral(&self, t: f64) -> f64 {
        let k = self.interval(t);
        self.cumulative[k] + self.piece_integral(k, t)
    }

    /// Constant W₂ up to `t_end`.
    pub fn constant(w1: f64, w2: f64, t_end: f64) -> Self {
        let n = 8;
        W2Path::tabulate(w1, (0..=n).map(|k| t_end * k as f64 / n as f64).collect(), vec![w2; n + 1])
    }

    pub fn t_end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.t.len();
        match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    fn stencil(&self, k: usize) -> usize {
        k.saturating_sub(1).min(self.t.len() - 4)
    }

    /// (W₂, dW₂/dt) at t, using the polynomial of interval `k`.
    fn eval_in(&self, k: usize, t: f64) -> (f64, f64) {
        let s = self.stencil(k);
        let ts = &self.t[s..s + 4];
        let ys = &self.w2[s..s + 4];
        let (mut v, mut d) = (0.0, 0.0);
        for a in 0..4 {
            let mut l = 1.0;
            let mut dl = 0.0;
            for b in 0..4 {
                if b == a {
                    continue;
                }
                let den = ts[a] - ts[b];
                dl = dl * (t - ts[b]) / den + l / den;
                l *= (t - ts[b]) / den;
            }
            v += ys[a] * l;
            d += ys[a] * dl;
        }
        (v, d)
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        self.eval_in(self.interval(t), t)
    }

    fn check(&self, t: f64) -> Result<(), OracleError> {
        if !(t >= 0.0) {
            return Err(OracleError::Invalid(format!("t = {t} must be >= 0")));
        }
        if t > self.t_end() {
            return Err(OracleError::NetTooShort(t));
        }
        Ok(())
    }
}

/// (1/(λ₂ − λ₁))·∂λ₂/∂W₂ with λ₁ = −λ₂.
fn i_integrand(w1: f64, w2: f64) -> f64 {
    dlambda2_dw2(w1, w2) / (2.0 * lambda2(w1, w2))
}

/// I_t as an integral over W₂ from its initial to its current value, W₁ held
/// at the characteristic's own value.
pub fn i_of_w2(w1: f64, w2_start: f64, w2_end: f64) -> f64 {
    // Panels of width ≤ 0.02 in W₂.
    let n = ((w2_end - w2_start).abs() / 0.02).ceil().max(1.0) as usize;
    let h = (w2_end - w2_start) / n as f64;
    (0..n)
        .map(|k| gauss(|w| i_integrand(w1, w), w2_start + k as f64 * h, w2_start + (k + 1) as f64 * h))
        .sum()
}

/// Closed form of [`i_of_w2`]: ln of the ratio of 1 + 3(W₂−W₁)/2, over 6.
pub fn i_closed_form(w1: f64, w2_start: f64, w2_end: f64) -> f64 {
    ((1.0 + 1.5 * (w2_end - w1)) / (1.0 + 1.5 * (w2_start - w1))).ln() / 6.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiccatiSlope {
    pub t: f64,
    /// ∂ₓW₁ on the characteristic.
    pub slope: f64,
    /// 1 + m·∫₀ᵗ e^{−I_τ} ∂λ₂/∂W₁ dτ; its first zero is the blow-up time.
    pub denominator: f64,
    pub i_t: f64,
}

/// ∂ₓW₁ along the 2-characteristic with initial slope `m`:
/// e^{−I_t}·m / (1 + m·∫₀ᵗ e^{−I_τ} ∂λ₂/∂W₁ dτ).
pub fn riccati_slope(path: &W2Path, m: f64, t: f64) -> Result<RiccatiSlope, OracleError> {
    path.check(t)?;
    let (w2, _) = path.eval(t);
    let i_t = i_of_w2(path.w1, path.w2[0], w2);
    let denominator = 1.0 + m * path.weighted_integral(t);
    if !(denominator > 0.0) {
        return Err(OracleError::PastBlowup { t, denominator });
    }
    Ok(RiccatiSlope { t, slope: (-i_t).exp() * m / denominator, denominator, i_t })
}

/// First zero of the denominator on the path, by bisection on a scan.
pub fn riccati_blowup_time(path: &W2Path, m: f64) -> Result<f64, OracleError> {
    let den = |t: f64| 1.0 + m * path.weighted_integral(t);
    let mut lo = 0.0;
    let mut hi = None;
    for &tk in &path.t[1..] {
        if den(tk) <= 0.0 {
            hi = Some(tk);
            break;
        }
        lo = tk;
    }
    let Some(mut hi) = hi else {
        return Err(OracleError::NetTooShort(path.t_end()));
    };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if den(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Integrates q' = −I'(t)·q − ∂λ₂/∂W₁·q² with RK4, `substeps` per path
/// interval (refined where |b·q|·h would exceed 0.05). Returns the samples
/// (t, q) at the path knots and `t_end`, stopping early once |q| exceeds
/// `q_cap`.
pub fn riccati_ode(path: &W2Path, m: f64, t_end: f64, substeps: usize, q_cap: f64) -> Result<Vec<(f64, f64)>, OracleError> {
    path.check(t_end)?;
    let rhs = |k: usize, t: f64, q: f64| {
        let (w2, dw2) = path.eval_in(k, t);
        -i_integrand(path.w1, w2) * dw2 * q - dlambda2_dw1(path.w1, w2) * q * q
    };
    let mut out = vec![(0.0, m)];
    let mut q = m;
    for k in 0..path.t.len() - 1 {
        let (a, b) = (path.t[k], path.t[k + 1].min(t_end));
        if b <= a {
            break;
        }
        let mut t = a;
        let base = (b - a) / substeps.max(1) as f64;
        while t < b {
            let (w2, _) = path.eval_in(k, t);
            let stiff = dlambda2_dw1(path.w1, w2).abs() * q.abs();
            let mut h = base.min(0.05 / stiff.max(1e-300)).min(b - t);
            if b - t - h < 1e-3 * h {
                h = b - t;
            }
            let k1 = rhs(k, t, q);
            let k2 = rhs(k, t + 0.5 * h, q + 0.5 * h * k1);
            let k3 = rhs(k, t + 0.5 * h, q + 0.5 * h * k2);
            let k4 = rhs(k, t + h, q + h * k3);
            q += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t = if h == b - t { b } else { t + h };
            if !q.is_finite() {
                return Err(OracleError::NotFinite { t });
            }
            if q.abs() > q_cap {
                out.push((t, q));
                return Ok(out);
            }
        }
        out.push((b, q));
    }
    Ok(out)
}
