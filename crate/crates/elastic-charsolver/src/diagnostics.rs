use serde::{Deserialize, Serialize};

/// sup |∂_zρ| over the interior of a sorted node set, with the
/// three-point formula for uneven spacing.
pub fn dz_rho1(z: &[f64], rho: &[f64]) -> f64 {
    let mut sup = 0.0f64;
    for k in 1..z.len().saturating_sub(1) {
        let (hm, hp) = (z[k] - z[k - 1], z[k + 1] - z[k]);
        let d = (hm * hm * (rho[k + 1] - rho[k]) + hp * hp * (rho[k] - rho[k - 1])) / (hm * hp * (hm + hp));
        sup = sup.max(d.abs());
    }
    sup
}

/// Trapezoid of v²/max(ρ, floor) over the nodes with lo ≤ z ≤ hi.
pub fn blowup_indicator(z: &[f64], v: &[f64], rho: &[f64], lo: f64, hi: f64, floor: f64) -> f64 {
    let f: Vec<(f64, f64)> = z
        .iter()
        .zip(v.iter().zip(rho))
        .filter(|(&zz, _)| zz >= lo && zz <= hi)
        .map(|(&zz, (&vv, &rr))| (zz, vv * vv / rr.max(floor)))
        .collect();
    f.windows(2).map(|p| 0.5 * (p[1].0 - p[0].0) * (p[0].1 + p[1].1)).sum()
}

/// Affine envelopes (lower, upper) for ρ₁(z₀, t).
pub fn rho_envelopes(t: f64, c11: f64, w0: f64, eps: f64) -> (f64, f64) {
    let a = c11.abs() * w0 * t;
    (
        (1.0 - eps) * (1.0 - (1.0 + eps).powi(3) * a),
        (1.0 + eps) * (1.0 - (1.0 - eps).powi(4) * a),
    )
}

/// Shock-time bounds 1/((1+ε)³|c₁₁|W₀) and 1/((1−ε)⁴|c₁₁|W₀).
pub fn shock_bracket(c11: f64, w0: f64, eps: f64) -> (f64, f64) {
    let s = c11.abs() * w0;
    (1.0 / ((1.0 + eps).powi(3) * s), 1.0 / ((1.0 - eps).powi(4) * s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Least-squares line through (x, y).
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    LinearFit { slope, intercept: my - slope * mx, r2, points: x.len() }
}
