use approx::assert_relative_eq;
use elastic_model::*;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn desk3() -> MaterialParams {
    MaterialParams::desk_default(DimMode::Planar3D)
}

fn desk2() -> MaterialParams {
    MaterialParams::desk_default(DimMode::Planar2D)
}

fn samples(params: &MaterialParams, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| sample_ball(&mut rng, params.n(), params.ball_radius() * 0.999))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum())
        .collect()
}

fn vec_mat(v: &[f64], a: &DMatrix<f64>) -> Vec<f64> {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| v[i] * a[(i, j)]).sum())
        .collect()
}

#[test]
fn material_constants_from_stored_energy() {
    let g = StoredEnergyCoeffs {
        gamma11: 1.0,
        gamma2: -0.5,
        gamma111: 0.0,
        gamma12: 0.0,
        gamma3: 0.0,
    };
    let p = sigma_from_gamma(&g, DimMode::Planar3D, 1e-2).unwrap();
    assert_eq!((p.c1, p.c2), (2.0, 1.0));
    assert_eq!(
        [p.sigma0, p.sigma1, p.sigma2, p.sigma3, p.sigma4],
        [6.0, 2.0, -1.0, 0.0, 4.0]
    );

    let equal_speeds = StoredEnergyCoeffs { gamma2: -2.0, ..g };
    assert!(sigma_from_gamma(&equal_speeds, DimMode::Planar3D, 1e-2).is_err());
    let no_sigma1 = StoredEnergyCoeffs { gamma12: 1.0, ..g };
    assert!(sigma_from_gamma(&no_sigma1, DimMode::Planar3D, 1e-2).is_err());
}

#[test]
fn rejects_bad_direct_parameters() {
    assert!(MaterialParams::new(1.0, 1.0, -1.0, 1.0, DimMode::Planar3D, 1e-2).is_err());
    assert!(MaterialParams::new(2.0, 1.0, 0.0, 1.0, DimMode::Planar3D, 1e-2).is_err());
    assert!(MaterialParams::new(2.0, 1.0, -1.0, 1.0, DimMode::Planar3D, 0.0).is_err());
    // The ball must be small enough for b > 0.
    assert!(MaterialParams::new(2.0, 1.0, -1.0, 1.0, DimMode::Planar3D, 0.3).is_err());
}

#[test]
fn aux_scalars_examples() {
    let p = desk3();
    let s = aux_scalars(&[0.0; 6], &p).unwrap();
    assert_eq!((s.a, s.b, s.c, s.d, s.delta), (4.0, 1.0, 0.0, 0.0, 9.0));
    let s = aux_scalars(&[0.01, 0.0, 0.0, 0.0, 0.0, 0.0], &p).unwrap();
    assert_relative_eq!(s.a, 3.98, epsilon = 1e-15);
    assert_relative_eq!(s.b, 1.02, epsilon = 1e-15);
    assert_eq!((s.c, s.d), (0.0, 0.0));
    let big = [3.0 * p.delta, 0.0, 0.0, 0.0, 0.0, 0.0];
    assert!(matches!(aux_scalars(&big, &p), Err(ModelError::Amplitude { .. })));
    assert!(matches!(aux_scalars(&[0.0; 4], &p), Err(ModelError::Dimension { .. })));
}

#[test]
fn coefficient_matrix_at_rest() {
    let a = coefficient_matrix(&[0.0; 6], &desk3()).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let expected = match (i, j) {
                (0, 3) | (1, 4) | (2, 5) => -1.0,
                (3, 0) => -4.0,
                (4, 1) | (5, 2) => -1.0,
                _ => 0.0,
            };
            assert_eq!(a[(i, j)], expected, "entry ({i},{j})");
        }
    }
    let a2 = coefficient_matrix(&[0.0; 4], &desk2()).unwrap();
    let expected2 = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, -1.0, 0.0, //
            0.0, 0.0, 0.0, -1.0, //
            -4.0, 0.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, 0.0,
        ],
    );
    assert_eq!(a2, expected2);
}

#[test]
fn entries_follow_the_quadratic_shorthand() {
    let p = desk3();
    let phi = [0.004, -0.003, 0.007, 0.001, 0.002, -0.005];
    let a = coefficient_matrix(&phi, &p).unwrap();
    assert_eq!(a[(3, 0)], -(4.0 + 2.0 * -1.0 * 0.004));
    assert_eq!(a[(3, 1)], -2.0 * -0.003);
    assert_eq!(a[(3, 2)], -2.0 * 0.007);
    assert_eq!(a[(4, 0)], -2.0 * -0.003);
    assert_eq!(a[(4, 1)], -(1.0 + 2.0 * 0.004));
    assert_eq!(a[(5, 0)], -2.0 * 0.007);
    assert_eq!(a[(5, 2)], -(1.0 + 2.0 * 0.004));
}

#[test]
fn characteristic_polynomial_factorizes() {
    let p = desk3();
    for phi in samples(&p, 50, 11) {
        let a = coefficient_matrix(&phi, &p).unwrap();
        let s = aux_scalars(&phi, &p).unwrap();
        for &lam in &[-2.5, -1.3, -0.2, 0.4, 1.1, 3.0] {
            let m = DMatrix::<f64>::identity(6, 6) * lam - &a;
            let l2 = lam * lam;
            let poly = (l2 - s.b) * ((l2 - s.a) * (l2 - s.b) - (s.c * s.c + s.d * s.d));
            let det = m.determinant();
            assert!((det - poly).abs() <= 1e-9 * poly.abs().max(1.0), "{det} vs {poly}");
        }
    }
}

#[test]
fn eigenvalues_at_reference_states() {
    let p = desk3();
    let s = spectrum(&[0.0; 6], &p, None).unwrap();
    assert_eq!(s.lambdas, vec![2.0, 1.0, 1.0, -1.0, -1.0, -2.0]);
    let s = spectrum(&[0.01, 0.0, 0.0, 0.0, 0.0, 0.0], &p, None).unwrap();
    assert_relative_eq!(s.lambdas[0], 3.98f64.sqrt(), epsilon = 1e-14);
    assert_relative_eq!(s.lambdas[0], 1.994994, epsilon = 1e-6);
    assert_relative_eq!(s.lambdas[1], 1.02f64.sqrt(), epsilon = 1e-14);
    assert_relative_eq!(s.lambdas[2], 1.02f64.sqrt(), epsilon = 1e-14);
    assert_relative_eq!(s.lambdas[1], 1.009950, epsilon = 1e-6);

    let s2 = spectrum(&[0.0; 4], &desk2(), None).unwrap();
    assert_eq!(s2.lambdas, vec![2.0, 1.0, -1.0, -2.0]);
}

fn check_frame(s: &Spectrum, a: &DMatrix<f64>, tol_bi: f64, tol_eig: f64) {
    let n = s.lambdas.len();
    let scale = a.norm();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let v = dot(&s.lefts[i], &s.rights[j]);
            assert!((v - target).abs() < tol_bi, "l{}·r{} = {v}", i + 1, j + 1);
        }
        let ar = mat_vec(a, &s.rights[i]);
        let res: f64 = ar
            .iter()
            .zip(&s.rights[i])
            .map(|(x, r)| (x - s.lambdas[i] * r).powi(2))
            .sum::<f64>()
            .sqrt();
        let rn = norm(&s.rights[i]);
        assert!(res <= tol_eig * scale * rn, "A r{} residual {res}", i + 1);
        let la = vec_mat(&s.lefts[i], a);
        let res: f64 = la
            .iter()
            .zip(&s.lefts[i])
            .map(|(x, l)| (x - s.lambdas[i] * l).powi(2))
            .sum::<f64>()
            .sqrt();
        let ln = norm(&s.lefts[i]);
        assert!(res <= tol_eig * scale * ln, "l{} A residual {res}", i + 1);
    }
}

#[test]
fn biorthogonal_frames_over_the_ball() {
    for params in [desk3(), desk2()] {
        for phi in samples(&params, 1000, 7) {
            let a = coefficient_matrix(&phi, &params).unwrap();
            for norm_kind in [Normalization::Natural, Normalization::UnitPolarization] {
                let s = spectrum_with(&phi, &params, None, norm_kind).unwrap();
                check_frame(&s, &a, 1e-10, 1e-9);
            }
        }
    }
}

#[test]
fn degenerate_transverse_slice_is_regularized() {
    let p = desk3();
    let phi = [0.005, 0.0, 0.0, -0.003, 0.0, 0.0];
    let a = coefficient_matrix(&phi, &p).unwrap();
    let s = spectrum(&phi, &p, None).unwrap();
    assert_eq!(s.direction_used, Some([0.0, 1.0]));
    assert_eq!(s.m, Some(2.0));
    check_frame(&s, &a, 1e-12, 1e-12);
    let s = spectrum(&phi, &p, Some([0.6, 0.8])).unwrap();
    assert_eq!(s.direction_used, Some([0.6, 0.8]));
    check_frame(&s, &a, 1e-12, 1e-12);
}

#[test]
fn natural_scaling_matches_raw_formulas() {
    let p = desk3();
    let phi = [0.003, 0.004, -0.002, 0.001, 0.0, 0.002];
    let s = spectrum(&phi, &p, None).unwrap();
    let aux = aux_scalars(&phi, &p).unwrap();
    let l3 = s.lambdas[2];
    let beta3 = (l3 * l3 - aux.b) / (2.0 * p.sigma1);
    let r3 = [beta3, phi[1], phi[2], -l3 * beta3, -l3 * phi[1], -l3 * phi[2]];
    for j in 0..6 {
        assert_relative_eq!(s.rights[2][j], r3[j], epsilon = 1e-15, max_relative = 1e-10);
    }
    let l2 = s.lambdas[1];
    let r5 = [0.0, phi[2], -phi[1], 0.0, l2 * phi[2], -l2 * phi[1]];
    for j in 0..6 {
        assert_relative_eq!(s.rights[4][j], r5[j], epsilon = 1e-15, max_relative = 1e-12);
    }
    let q = aux.c * aux.c + aux.d * aux.d;
    let sd = aux.delta.sqrt();
    let n_natural = (aux.delta - (aux.a - aux.b) * sd) / (4.0 * p.sigma1 * p.sigma1);
    assert_relative_eq!(s.n, n_natural, max_relative = 1e-6);
    assert_relative_eq!(
        s.n,
        q * sd / (p.sigma1 * p.sigma1 * (sd + aux.a - aux.b)),
        max_relative = 1e-12
    );
    let k_natural = (aux.delta + (aux.a - aux.b) * sd) / (4.0 * p.sigma1 * p.sigma1);
    assert_relative_eq!(s.k, k_natural, max_relative = 1e-14);
    assert_relative_eq!(
        s.m.unwrap(),
        2.0 * (phi[1] * phi[1] + phi[2] * phi[2]),
        max_relative = 1e-14
    );
}

fn fd_gradient(params: &MaterialParams, phi: &[f64], fam: usize) -> Vec<f64> {
    let lam = |x: &[f64]| spectrum(x, params, None).unwrap().lambdas[fam];
    let h = 1e-6 * norm(phi).max(1.0);
    let central = |h: f64, j: usize| {
        let mut xp = phi.to_vec();
        let mut xm = phi.to_vec();
        xp[j] += h;
        xm[j] -= h;
        (lam(&xp) - lam(&xm)) / (2.0 * h)
    };
    (0..phi.len())
        .map(|j| (4.0 * central(h / 2.0, j) - central(h, j)) / 3.0)
        .collect()
}

#[test]
fn eigenvalue_gradients_match_finite_differences() {
    for params in [desk3(), desk2()] {
        let pts = samples(&params, 100, 3);
        for phi in pts.iter().map(|v| v.iter().map(|x| x * 0.95).collect::<Vec<_>>()) {
            let g = grad_lambda(&phi, &params).unwrap();
            for fam in 0..params.n() {
                let fd = fd_gradient(&params, &phi, fam);
                for j in 0..params.n() {
                    assert!(
                        (g[fam][j] - fd[j]).abs() < 1e-7,
                        "family {} comp {j}: {} vs {}",
                        fam + 1,
                        g[fam][j],
                        fd[j]
                    );
                }
            }
        }
    }
}

#[test]
fn gradient_closed_forms_at_rest() {
    let p = desk3();
    let g = grad_lambda(&[0.0; 6], &p).unwrap();
    assert_relative_eq!(g[0][0], p.sigma0 / p.c1, epsilon = 1e-15);
    assert_relative_eq!(g[0][0], -0.5, epsilon = 1e-15);
    let phi = [0.004, -0.006, 0.002, 0.01, -0.003, 0.0];
    let g = grad_lambda(&phi, &p).unwrap();
    let lam2 = spectrum(&phi, &p, None).unwrap().lambdas[1];
    assert_eq!(g[1][0], p.sigma1 / lam2);
    assert!(g[1][1..].iter().all(|&x| x == 0.0));
    for j in 0..6 {
        assert_eq!(g[0][j], -g[5][j]);
        assert_eq!(g[2][j], -g[3][j]);
    }
}

#[test]
fn ordering_and_coalescence() {
    let p = desk3();
    for phi in samples(&p, 1000, 5) {
        let l = spectrum(&phi, &p, None).unwrap().lambdas;
        assert!(l[5] < l[4] && l[4] <= l[3] && l[3] < l[2] && l[2] <= l[1] && l[1] < l[0]);
        // Random transverse amplitude is never exactly zero.
        assert!(l[1] > l[2] && l[4] < l[3]);
        let mut flat = phi.clone();
        flat[1] = 0.0;
        flat[2] = 0.0;
        let l = spectrum(&flat, &p, None).unwrap().lambdas;
        assert_eq!(l[1], l[2]);
        assert_eq!(l[3], l[4]);
    }
}

#[test]
fn eigenvalues_depend_on_transverse_amplitude_only() {
    let p = desk3();
    for phi in samples(&p, 200, 9) {
        let base = spectrum(&phi, &p, None).unwrap().lambdas;
        for angle in [0.3f64, 1.7, 4.0] {
            let (c, s) = (angle.cos(), angle.sin());
            let mut rot = phi.clone();
            rot[1] = c * phi[1] - s * phi[2];
            rot[2] = s * phi[1] + c * phi[2];
            let l = spectrum(&rot, &p, None).unwrap().lambdas;
            for i in 0..6 {
                assert_relative_eq!(l[i], base[i], max_relative = 1e-14);
            }
        }
    }
}

#[test]
fn determinant_vanishes_at_each_eigenvalue() {
    let p = desk3();
    for phi in samples(&p, 100, 13) {
        let a = coefficient_matrix(&phi, &p).unwrap();
        let an = a.norm();
        for lam in spectrum(&phi, &p, None).unwrap().lambdas {
            let det = (DMatrix::<f64>::identity(6, 6) * lam - &a).determinant();
            assert!(det.abs() < 1e-8 * an.powi(6), "det = {det}");
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn ball_state(n: usize, radius: f64) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, n).prop_map(move |v| {
            let r = norm(&v).max(1.0);
            v.iter().map(|x| x / r * radius).collect()
        })
    }

    proptest! {
        #[test]
        fn frames_are_biorthogonal(phi in ball_state(6, 0.0199)) {
            let p = desk3();
            let a = coefficient_matrix(&phi, &p).unwrap();
            let s = spectrum_with(&phi, &p, None, Normalization::UnitPolarization).unwrap();
            check_frame(&s, &a, 1e-10, 1e-9);
        }

        #[test]
        fn two_d_frames_are_biorthogonal(phi in ball_state(4, 0.0199)) {
            let p = desk2();
            let a = coefficient_matrix(&phi, &p).unwrap();
            let s = spectrum(&phi, &p, None).unwrap();
            check_frame(&s, &a, 1e-10, 1e-9);
            let gaps: Vec<f64> = s.lambdas.windows(2).map(|w| w[0] - w[1]).collect();
            prop_assert!(gaps.iter().all(|&g| g > 0.9));
        }

        #[test]
        fn embedding_preserves_a(phi in ball_state(4, 0.0199), v in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let p = desk2();
            let a = coefficient_matrix(&phi, &p).unwrap();
            let full = apply_a(&embed(&phi, DimMode::Planar2D), &p, &embed(&v, DimMode::Planar2D));
            let small = mat_vec(&a, &v);
            for (k, &s) in SLOTS_2D.iter().enumerate() {
                prop_assert!((full[s] - small[k]).abs() < 1e-15);
            }
            prop_assert_eq!(full[2], 0.0);
            prop_assert_eq!(full[5], 0.0);
        }
    }
}
