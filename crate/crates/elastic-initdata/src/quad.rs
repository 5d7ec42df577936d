//! Gauss–Legendre panels with bisection refinement.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

const MAX_DEPTH: u32 = 30;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(NonZeroUsize::new(32).unwrap());
        gl.as_node_weight_pairs().to_vec()
    })
}

/// 32-point Gauss–Legendre on [a, b].
pub fn gl32<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * rule().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Bisects until the one-panel and two-panel values agree to `tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F, tol: f64) -> f64 {
    let whole = gl32(a, b, &mut *f);
    refine(a, b, f, whole, tol, MAX_DEPTH)
}

fn refine<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl32(a, m, &mut *f);
    let right = gl32(m, b, &mut *f);
    if (left + right - whole).abs() <= tol || depth == 0 {
        return left + right;
    }
    refine(a, m, f, left, 0.5 * tol, depth - 1) + refine(m, b, f, right, 0.5 * tol, depth - 1)
}

/// Sum of fixed GL32 panels: `per_gap` equal panels between consecutive breaks.
pub fn panels<F: FnMut(f64) -> f64>(breaks: &[f64], per_gap: usize, mut f: F) -> f64 {
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / per_gap as f64;
        for k in 0..per_gap {
            let a = w[0] + k as f64 * h;
            total += gl32(a, a + h, &mut f);
        }
    }
    total
}
