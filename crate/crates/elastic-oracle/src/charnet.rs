use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::single_wave::lambda2;

/// Points of one 2-characteristic where it meets the 1-characteristics of
/// the net: times, positions and the W₂ carried in from the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPath {
    pub y2: f64,
    pub w1: f64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub w2: Vec<f64>,
}

/// Characteristic net of the single-wave system on labels y₂ + k·h,
/// k = 0..=n. The point (i, j), j ≥ i, is where the 2-characteristic from
/// yᵢ meets the 1-characteristic from yⱼ; there W = (W₁⁰(yᵢ), W₂⁰(yⱼ))
/// exactly, so each point follows from its two predecessors by the
/// trapezoid rule along both characteristics. Returns the path of the
/// 2-characteristic from `y2`.
pub fn char_net_path<F1: Fn(f64) -> f64, F2: Fn(f64) -> f64>(
    w1_0: F1,
    w2_0: F2,
    y2: f64,
    h: f64,
    n: usize,
) -> Result<CharPath, OracleError> {
    if !(h > 0.0) || n < 2 {
        return Err(OracleError::Invalid("need h > 0 and n >= 2".into()));
    }
    let y: Vec<f64> = (0..=n).map(|k| y2 + k as f64 * h).collect();
    let w1: Vec<f64> = y.iter().map(|&v| w1_0(v)).collect();
    let w2: Vec<f64> = y.iter().map(|&v| w2_0(v)).collect();
    // Row i+1 (t, x over j), then row i.
    let mut t_next = vec![0.0; n + 1];
    let mut x_next = vec![0.0; n + 1];
    let mut t_row = vec![0.0; n + 1];
    let mut x_row = vec![0.0; n + 1];
    for i in (0..=n).rev() {
        t_row[i] = 0.0;
        x_row[i] = y[i];
        for j in i + 1..=n {
            let lp2 = lambda2(w1[i], w2[j]);
            // A = (i, j−1) on the same 2-characteristic.
            let la2 = lambda2(w1[i], w2[j - 1]);
            // B = (i+1, j) on the same 1-characteristic (speed −λ₂).
            let lb1 = -lambda2(w1[i + 1], w2[j]);
            let mu2 = 0.5 * (la2 + lp2);
            let mu1 = 0.5 * (lb1 - lp2);
            let (ta, xa) = (t_row[j - 1], x_row[j - 1]);
            let (tb, xb) = (t_next[j], x_next[j]);
            let tp = (xb - xa + mu2 * ta - mu1 * tb) / (mu2 - mu1);
            t_row[j] = tp;
            x_row[j] = xa + mu2 * (tp - ta);
        }
        std::mem::swap(&mut t_row, &mut t_next);
        std::mem::swap(&mut x_row, &mut x_next);
    }
    // After the final swap row 0 sits in *_next.
    Ok(CharPath { y2, w1: w1[0], t: t_next, x: x_next, w2 })
}
