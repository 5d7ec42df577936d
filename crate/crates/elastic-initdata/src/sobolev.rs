use serde::{Deserialize, Serialize};

use crate::profile::Profile;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H1Estimate {
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HHalfEstimate {
    pub value: f64,
    /// value² = (η/2)·G with G the one-dimensional Gagliardo integral.
    pub squared: f64,
    /// Contributions to G from the regions |y| ≤ √η, y > √η together with
    /// y < −√η, x > 2η and x < η.
    pub parts: [f64; 4],
    /// Bound on the omitted |y| < cutoff part of value².
    pub cutoff_error: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HHalfOptions {
    /// Inner cutoff in units of η.
    pub cutoff: f64,
    /// Interpolation table size over [η, 2η].
    pub table_points: usize,
    /// GL32 panels per side in log|y|.
    pub y_panels: usize,
    /// GL32 panels over [η, 2η] for the x integrals.
    pub x_panels: usize,
}

impl Default for HHalfOptions {
    fn default() -> Self {
        HHalfOptions { cutoff: 1e-6, table_points: 8001, y_panels: 24, x_panels: 40 }
    }
}

fn log_factor(eta: f64, alpha: f64) -> f64 {
    1.0 + (1.2 * eta).ln().abs().powf(alpha) + (1.8 * eta).ln().abs().powf(alpha)
}

/// Ball-restricted Ḣ¹ norm of the x-independent-in-Y extension: the square
/// root of ∫ |w′(x)|² ((η/2)² − (x − 3η/2)²) dx over [η, 2η].
pub fn sobolev_h1_estimate(profile: &Profile, eta: f64, theta: f64, alpha: f64) -> H1Estimate {
    let mut breaks = vec![eta];
    breaks.extend(profile.breaks().into_iter().filter(|&b| b > eta && b < 2.0 * eta));
    breaks.push(2.0 * eta);
    breaks.dedup();
    let sq = quad::panels(&breaks, 8, |x| {
        let d = profile.derivative(x);
        d * d * (x - eta) * (2.0 * eta - x)
    });
    let value = sq.max(0.0).sqrt();
    let bound = theta * eta.sqrt() * log_factor(eta, alpha);
    H1Estimate { value, bound, ratio: if bound > 0.0 { value / bound } else { 0.0 } }
}

/// Cubic Hermite table of a profile on [η, 2η]; zero outside.
struct Table {
    a: f64,
    h: f64,
    v: Vec<f64>,
    d: Vec<f64>,
}

impl Table {
    fn new(profile: &Profile, eta: f64, points: usize) -> Self {
        let h = eta / (points - 1) as f64;
        let xs = (0..points).map(|j| eta + j as f64 * h);
        let (v, d) = xs.map(|x| (profile.value(x), profile.derivative(x))).unzip();
        Table { a: eta, h, v, d }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.a) / self.h;
        if t <= 0.0 || t >= (self.v.len() - 1) as f64 {
            return 0.0;
        }
        let j = t.floor() as usize;
        let s = t - j as f64;
        let (h00, h10) = ((1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s), s * (1.0 - s) * (1.0 - s));
        let (h01, h11) = (s * s * (3.0 - 2.0 * s), s * s * (s - 1.0));
        h00 * self.v[j] + h10 * self.h * self.d[j] + h01 * self.v[j + 1] + h11 * self.h * self.d[j + 1]
    }
}

/// Ḣ^½ estimate of the disc extension in 2D: value² = (η/2)·G with
/// G = ∬ [w(x+y) − w(x)]²/y² dx dy split into the near-diagonal strip
/// |y| ≤ √η (computed numerically on a log-graded y mesh) and the far
/// regions where one of the two values vanishes (reduced to 1D integrals).
/// Requires η ≤ 1 so that √η ≥ η.
pub fn sobolev_hhalf_estimate(
    profile: &Profile,
    eta: f64,
    theta: f64,
    alpha: f64,
    opts: HHalfOptions,
) -> HHalfEstimate {
    assert!(eta > 0.0 && eta <= 1.0, "H^1/2 splitting needs 0 < eta <= 1");
    let bound = theta * eta.powf(0.25) * log_factor(eta, alpha);
    if profile.is_zero() {
        return HHalfEstimate {
            value: 0.0,
            squared: 0.0,
            parts: [0.0; 4],
            cutoff_error: 0.0,
            bound,
            ratio: 0.0,
        };
    }
    let tab = Table::new(profile, eta, opts.table_points);
    let (a, b) = (eta, 2.0 * eta);
    let root = eta.sqrt();
    let xb = [a, b];

    let near = {
        let (lo, hi) = ((opts.cutoff * eta).ln(), root.ln());
        let mut total = 0.0;
        for sign in [-1.0, 1.0] {
            total += quad::panels(&[lo, hi], opts.y_panels, |u| {
                let y = sign * u.exp();
                let inner = quad::panels(&xb, opts.x_panels, |x| {
                    let diff = tab.eval(x + y) - tab.eval(x);
                    diff * diff
                });
                // dy = y du on each side
                inner / (y * y) * y.abs()
            });
        }
        total
    };
    let w2 = |f: &dyn Fn(f64) -> f64| quad::panels(&xb, opts.x_panels, |x| f(x));
    let mass = w2(&|x| tab.eval(x).powi(2));
    let far_y = 2.0 * mass / root;
    // The weights blow up only where w already vanishes to all orders.
    let right = w2(&|z| {
        let v = tab.eval(z);
        if v == 0.0 { 0.0 } else { v * v / (b - z) }
    });
    let left = w2(&|z| {
        let v = tab.eval(z);
        if v == 0.0 { 0.0 } else { v * v / (z - a) }
    });
    let g = near + far_y + right + left;
    let sup_d = tab.d.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let cutoff_error = 0.5 * eta * 2.0 * opts.cutoff * eta * eta * sup_d * sup_d;
    let squared = 0.5 * eta * g;
    let value = squared.sqrt();
    HHalfEstimate {
        value,
        squared,
        parts: [near, far_y, right, left],
        cutoff_error,
        bound,
        ratio: if bound > 0.0 { value / bound } else { 0.0 },
    }
}
