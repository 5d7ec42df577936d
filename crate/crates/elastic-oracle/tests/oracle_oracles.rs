use approx::assert_relative_eq;
use elastic_model::{frame6, DimMode, MaterialParams, Normalization, Vec6};
use elastic_oracle::*;
use proptest::prelude::*;

/// (1 − s²)⁴ on |s| < 1, s = (y − c)/h.
fn bump(y: f64, c: f64, h: f64) -> f64 {
    let s = (y - c) / h;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(4)
    }
}

fn dbump(y: f64, c: f64, h: f64) -> f64 {
    let s = (y - c) / h;
    if s.abs() >= 1.0 {
        0.0
    } else {
        -8.0 * s * (1.0 - s * s).powi(3) / h
    }
}

const A1: f64 = 0.3;
const A2: f64 = 0.2;
const Y2: f64 = 0.3;

fn w1_0(y: f64) -> f64 {
    A1 * bump(y, 0.5, 0.5)
}

fn w2_0(y: f64) -> f64 {
    A2 * bump(y, 3.0, 1.0)
}

fn interacting_path() -> W2Path {
    let path = char_net_path(w1_0, w2_0, Y2, 0.005, 1600).unwrap();
    W2Path::from_path(&path).unwrap()
}

#[test]
fn invariants_examples() {
    assert_eq!(single_wave_invariants(0.0, 0.0).unwrap(), (0.0, 0.0));
    let (w1, w2) = single_wave_invariants(0.3, 0.0).unwrap();
    assert_relative_eq!(w1, 0.3, epsilon = 1e-15);
    assert_relative_eq!(w2, 0.3, epsilon = 1e-15);
    assert!(matches!(single_wave_invariants(0.0, -0.5), Err(OracleError::Vacuum(_))));
    assert!(matches!(single_wave_inverse(1.0, 0.0), Err(OracleError::Vacuum(_))));
    let s = SingleWaveState::from_v(0.1, 0.2).unwrap();
    assert_relative_eq!(single_wave_inverse(s.w1, s.w2).unwrap().0, 0.1, epsilon = 1e-15);
    // λ₂ = √(1 + 2V₂) through the invariants.
    assert_relative_eq!(lambda2(s.w1, s.w2), 1.4f64.sqrt(), max_relative = 1e-14);
    assert!(dlambda2_dw1(s.w1, s.w2) < 0.0);
}

proptest! {
    #[test]
    fn invariants_round_trip(v1 in -2.0..2.0f64, v2 in -0.45..2.0f64) {
        let (w1, w2) = single_wave_invariants(v1, v2).unwrap();
        let (a, b) = single_wave_inverse(w1, w2).unwrap();
        prop_assert!((a - v1).abs() <= 1e-12 && (b - v2).abs() <= 1e-12);
    }

    #[test]
    fn lambda_derivatives_match_differences(w1 in -0.3..0.3f64, w2 in -0.3..0.3f64) {
        let h = 1e-6;
        let d1 = (lambda2(w1 + h, w2) - lambda2(w1 - h, w2)) / (2.0 * h);
        let d2 = (lambda2(w1, w2 + h) - lambda2(w1, w2 - h)) / (2.0 * h);
        prop_assert!((d1 - dlambda2_dw1(w1, w2)).abs() < 1e-8);
        prop_assert!((d2 - dlambda2_dw2(w1, w2)).abs() < 1e-8);
    }
}

#[test]
fn zero_initial_slope_stays_zero() {
    let path = interacting_path();
    for t in [0.0, 0.5, 1.0, 3.0] {
        assert_eq!(riccati_slope(&path, 0.0, t).unwrap().slope, 0.0);
    }
}

#[test]
fn constant_w2_is_pure_riccati() {
    let (w1, w2, m) = (0.1, -0.05, 0.8);
    let path = W2Path::constant(w1, w2, 4.0);
    let b = dlambda2_dw1(w1, w2);
    for t in [0.0, 0.7, 1.5, 2.05] {
        let r = riccati_slope(&path, m, t).unwrap();
        assert!(r.i_t.abs() < 1e-15);
        assert_relative_eq!(r.slope, m / (1.0 + m * b * t), max_relative = 1e-13);
    }
    let tb = riccati_blowup_time(&path, m).unwrap();
    assert_relative_eq!(tb, -1.0 / (m * b), max_relative = 1e-12);
    assert!(matches!(riccati_slope(&path, m, 3.9), Err(OracleError::PastBlowup { .. })));
    assert!(matches!(riccati_slope(&path, m, 4.5), Err(OracleError::NetTooShort(_))));
    // A negative slope never blows up forward in time.
    assert!(matches!(riccati_blowup_time(&path, -m), Err(OracleError::NetTooShort(_))));
}

#[test]
fn i_quadrature_matches_closed_form() {
    for (w1, a, b) in [(0.0, 0.0, 0.2), (0.25, -0.1, 0.3), (-0.2, 0.1, -0.15)] {
        assert_relative_eq!(i_of_w2(w1, a, b), i_closed_form(w1, a, b), epsilon = 1e-13);
    }
}

#[test]
fn net_reproduces_straight_characteristics() {
    // W₂ ≡ 0: the 2-characteristic from Y2 is the line Y2 + λ₂(W₁⁰(Y2), 0)·t.
    let path = char_net_path(w1_0, |_| 0.0, Y2, 0.01, 400).unwrap();
    let speed = lambda2(w1_0(Y2), 0.0);
    for (t, x) in path.t.iter().zip(&path.x) {
        assert_relative_eq!(*x, Y2 + speed * t, epsilon = 1e-12);
    }
    assert!(path.t.windows(2).all(|w| w[1] > w[0]));
    assert!(char_net_path(w1_0, w2_0, 0.0, 0.0, 10).is_err());
}

#[test]
fn net_converges_at_second_order() {
    // Meeting time with the 1-characteristic from y = Y2 + 3.6.
    let at = |h: f64| {
        let n = (3.6 / h).round() as usize;
        char_net_path(w1_0, w2_0, Y2, h, n).unwrap().t[n]
    };
    let (a, b, c) = (at(0.02), at(0.01), at(0.005));
    let order = ((a - b) / (b - c)).abs().log2();
    assert!(order > 1.8, "order {order}");
}

#[test]
fn formula_matches_riccati_ode_and_blowup() {
    let path = interacting_path();
    let m = A1 * dbump(Y2, 0.5, 0.5);
    assert!(m > 0.0);
    let tb = riccati_blowup_time(&path, m).unwrap();
    // W₂ must actually vary along the path before blow-up.
    let (w2_mid, _) = path.eval(0.9 * tb);
    assert!(w2_mid.abs() > 0.02, "W2 at 0.9 Tb = {w2_mid}");
    let ode = riccati_ode(&path, m, 0.9 * tb, 64, f64::INFINITY).unwrap();
    let mut worst = 0.0f64;
    for &(t, q) in &ode {
        let r = riccati_slope(&path, m, t).unwrap();
        worst = worst.max(((r.slope - q) / r.slope).abs());
    }
    assert!(worst < 1e-6, "formula vs ODE {worst:e}");

    let tol = 1e-4;
    let run = riccati_ode(&path, m, path.t_end(), 64, 1.0 / tol).unwrap();
    let &(t_num, q_num) = run.last().unwrap();
    assert!(q_num > 1.0 / tol);
    assert!(((t_num - tb) / tb).abs() < 0.03, "numeric {t_num} vs denominator root {tb}");
}

#[test]
fn riemann_invariants_constant_along_opposite_characteristics() {
    let dt = 1e-4;
    let t_end = 1.0;
    // W₁ carried by straight 2-characteristics; W₂ ≡ 0.05.
    let wave2 = SimpleWave { family: 2, profile: w1_0, fixed: 0.05 };
    let b2 = (lambda2(A1, 0.05), lambda2(0.0, 0.05));
    for y in [0.2, 0.35, 0.5, 0.7] {
        let v = |x: f64, t: f64| wave2.state(x, t, b2).unwrap();
        let tr = trace_characteristic(v, 2, y, t_end, dt);
        let drift = tr
            .iter()
            .map(|&(t, x)| {
                let (v1, v2) = v(x, t);
                (single_wave_invariants(v1, v2).unwrap().0 - w1_0(y)).abs()
            })
            .fold(0.0, f64::max);
        assert!(drift / t_end < 1e-8, "W1 drift {drift:e} from y = {y}");
    }
    // W₂ carried by straight 1-characteristics; W₁ ≡ −0.05.
    let wave1 = SimpleWave { family: 1, profile: w1_0, fixed: -0.05 };
    let b1 = (-lambda2(-0.05, A1), -lambda2(-0.05, 0.0));
    for y in [0.2, 0.5, 0.8] {
        let v = |x: f64, t: f64| wave1.state(x, t, b1).unwrap();
        let tr = trace_characteristic(v, 1, y, t_end, dt);
        let drift = tr
            .iter()
            .map(|&(t, x)| {
                let (v1, v2) = v(x, t);
                (single_wave_invariants(v1, v2).unwrap().1 - w1_0(y)).abs()
            })
            .fold(0.0, f64::max);
        assert!(drift / t_end < 1e-8, "W2 drift {drift:e} from y = {y}");
    }
}

fn default_params() -> MaterialParams {
    MaterialParams::desk_default(DimMode::Planar3D)
}

#[test]
fn fv_constant_state_is_preserved() {
    let p = default_params();
    let c: Vec6 = [1e-3, -2e-3, 5e-4, 3e-4, 0.0, -1e-3];
    let phi0 = vec![c; 50];
    let cfg = FvConfig { frame_speed: 0.7, ..FvConfig::default() };
    let out = fv_solve(0.0, 0.01, &phi0, &p, 0.2, &[0.1], &cfg).unwrap();
    assert_eq!(out.len(), 2);
    assert_relative_eq!(out[1].x0, 0.7 * 0.2, epsilon = 1e-14);
    for f in &out {
        for v in &f.phi {
            for k in 0..6 {
                assert!((v[k] - c[k]).abs() < 1e-17);
            }
        }
    }
}

#[test]
fn fv_rejects_bad_input() {
    let p = default_params();
    let phi0 = vec![[0.0; 6]; 10];
    let bad = FvConfig { cfl: 0.6, ..FvConfig::default() };
    assert!(matches!(fv_solve(0.0, 0.01, &phi0, &p, 0.1, &[], &bad), Err(OracleError::Invalid(_))));
    assert!(fv_solve(0.0, 0.01, &phi0[..2], &p, 0.1, &[], &FvConfig::default()).is_err());
    let mut nan = phi0.clone();
    nan[4][0] = f64::NAN;
    assert!(matches!(
        fv_solve(0.0, 0.01, &nan, &p, 0.1, &[], &FvConfig::default()),
        Err(OracleError::NotFinite { .. } | OracleError::Cfl { .. })
    ));
}

#[test]
fn fv_linear_pulses_translate_at_frozen_speeds() {
    let p = default_params();
    let rest = frame6(&[0.0; 6], &p, Normalization::UnitPolarization, [0.0, 1.0]);
    let (dx, n) = (0.005, 1200);
    let x0 = -3.0;
    let amp = 1e-6;
    let t_end = 1.0;
    for fam in 0..6 {
        let phi0: Vec<Vec6> = (0..n)
            .map(|j| {
                let g = amp * bump(x0 + j as f64 * dx, 0.0, 0.3);
                std::array::from_fn(|k| g * rest.r[fam][k])
            })
            .collect();
        let out = fv_solve(x0, dx, &phi0, &p, t_end, &[], &FvConfig::default()).unwrap();
        let f = &out[0];
        // Wave amplitude lᶠᵃᵐ·Φ at t_end, cross-correlated with the initial one.
        let amp_of = |v: &Vec6| (0..6).map(|k| rest.l[fam][k] * v[k]).sum::<f64>();
        let a0: Vec<f64> = phi0.iter().map(amp_of).collect();
        let a1: Vec<f64> = f.phi.iter().map(amp_of).collect();
        let max_lag = (2.5 / dx) as i64;
        let (mut best, mut best_lag) = (f64::MIN, 0i64);
        for lag in -max_lag..=max_lag {
            let s: f64 = (0..n as i64)
                .filter(|j| (0..n as i64).contains(&(j + lag)))
                .map(|j| a0[j as usize] * a1[(j + lag) as usize])
                .sum();
            if s > best {
                best = s;
                best_lag = lag;
            }
        }
        let expected = rest.lambda[fam] * t_end / dx;
        assert!((best_lag as f64 - expected).abs() <= 1.0, "family {fam}: lag {best_lag} vs {expected}");
    }
}
