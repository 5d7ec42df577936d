use std::sync::OnceLock;

use approx::assert_relative_eq;
use elastic_charsolver::*;
use elastic_initdata::{build_initial_family, InitialDataSpec, InitialFamilies};
use elastic_model::{frame6, DimMode, MaterialParams, Normalization};
use proptest::prelude::*;

fn default_setup() -> (MaterialParams, InitialFamilies) {
    let params = MaterialParams::desk_default(DimMode::Planar3D);
    let data = build_initial_family(&InitialDataSpec::default_for(DimMode::Planar3D), &params).unwrap();
    (params, data)
}

fn default_run() -> &'static RunResult {
    static RUN: OnceLock<RunResult> = OnceLock::new();
    RUN.get_or_init(|| {
        let (params, data) = default_setup();
        simulate(&params, &data, &SolverConfig::default(), &RunOptions::default()).unwrap()
    })
}

/// Default spacing (the data reconstruction needs it) with fewer nodes.
fn light() -> SolverConfig {
    SolverConfig { nodes_family1: 41, nodes_other: 11, ..SolverConfig::default() }
}

#[test]
fn separation_time_examples() {
    let tiny = MaterialParams::new(2.0, 1.0, -1.0, 1.0, DimMode::Planar3D, 1e-12).unwrap();
    assert_relative_eq!(strip_gap(&tiny), 1.0, max_relative = 1e-9);
    assert_relative_eq!(separation_time(0.1, &tiny).unwrap(), 0.1, max_relative = 1e-9);
    assert_eq!(separation_time(0.0, &tiny).unwrap(), 0.0);
    let t0s: Vec<f64> = [1e-3, 4e-3, 1e-2]
        .iter()
        .map(|&d| {
            let p = MaterialParams::new(2.0, 1.0, -1.0, 1.0, DimMode::Planar3D, d).unwrap();
            separation_time(0.1, &p).unwrap()
        })
        .collect();
    assert!(t0s[0] < t0s[1] && t0s[1] < t0s[2], "{t0s:?}");
}

#[test]
fn omega_region_geometry() {
    let p = MaterialParams::desk_default(DimMode::Planar3D);
    let o = omega_region(3.0, 0.1, &p);
    assert_eq!(o.semi_axes, vec![0.05, 0.025, 0.025]);
    assert_relative_eq!(o.center[0], 2.0 * 3.0 + 0.15, max_relative = 1e-15);
    assert_relative_eq!(o.measure, 1.309e-4, max_relative = 1e-3);
    let ratio = |eta: f64| omega_region(1.0, eta, &p).measure / eta.powi(3);
    assert_relative_eq!(ratio(0.1), ratio(0.01), max_relative = 1e-12);
    let p2 = MaterialParams::desk_default(DimMode::Planar2D);
    let e = omega_region(1.0, 0.1, &p2);
    assert_eq!(e.semi_axes.len(), 2);
    assert_relative_eq!(e.measure, std::f64::consts::PI * 0.05 * 0.025, max_relative = 1e-15);
}

#[test]
fn config_validation() {
    assert!(SolverConfig::default().validate().is_ok());
    for cfg in [
        SolverConfig { dt_cfl: 0.6, ..SolverConfig::default() },
        SolverConfig { rho_stop: 0.2, ..SolverConfig::default() },
        SolverConfig { epsilon: 0.02, ..SolverConfig::default() },
        SolverConfig { cells_per_eta: 0.0, ..SolverConfig::default() },
    ] {
        assert!(matches!(cfg.validate(), Err(SolverError::Config(_))));
    }
}

#[test]
fn zero_and_constant_states_are_invariant() {
    let p = MaterialParams::desk_default(DimMode::Planar3D);
    let mut g = EulerGrid::new(0.0, 1e-3, vec![[0.0; 6]; 200]);
    for _ in 0..100 {
        g.step(1e-4, 2.0, &p);
    }
    assert!(g.phi.iter().flatten().all(|&v| v == 0.0));
    let c = [1e-3, -2e-3, 5e-4, 3e-4, 0.0, -1e-3];
    let mut g = EulerGrid::new(0.0, 1e-3, vec![c; 200]);
    for _ in 0..100 {
        g.step(1e-4, 2.1, &p);
    }
    assert!(g.phi.iter().all(|v| v == &c));

    // Nodes in a quiescent field: only X moves, at speed λᵢ(0).
    let zero = EulerGrid::new(0.0, 1e-3, vec![[0.0; 6]; 200]);
    let lam = [2.0, 1.0, 1.0, -1.0, -1.0, -2.0];
    for fam in 0..6 {
        let e = node_rhs(fam, &[0.1, 1.0, 0.0, 0.0], [0.0, 1.0], None, &zero, &p);
        assert_relative_eq!(e.dy[0], lam[fam], max_relative = 1e-15);
        assert_eq!(&e.dy[1..], &[0.0, 0.0, 0.0]);
    }
}

#[test]
fn linearized_transport_follows_frozen_speeds() {
    let params = MaterialParams::desk_default(DimMode::Planar3D);
    let mut spec = InitialDataSpec::default_for(DimMode::Planar3D);
    spec.theta *= 1e-6;
    let data = build_initial_family(&spec, &params).unwrap();
    let opts = RunOptions { stop_at: Some(0.5), snapshot_times: vec![] };
    let r = simulate(&params, &data, &light(), &opts).unwrap();
    assert_eq!(r.stop, StopReason::StopAt);
    let t = r.t_end();
    assert_relative_eq!(t, 0.5, max_relative = 1e-12);
    let zero = frame6(&[0.0; 6], &params, Normalization::UnitPolarization, [0.0, 1.0]);
    for fam in &r.history.families {
        let lam = zero.lambda[fam.family];
        for (z, rec) in fam.seeds.iter().zip(fam.steps.last().unwrap()) {
            let err = (rec.x - (z + lam * t)).abs() / (lam * t).abs();
            assert!(err < 1e-6, "family {} z {z}: {err:e}", fam.family + 1);
        }
    }
}

#[test]
fn initial_diagnostics() {
    let r = default_run();
    let row = &r.series[0];
    assert_eq!(row.t, 0.0);
    assert_eq!((row.s, row.smin, row.rho1_min), (1.0, 1.0, 1.0));
    assert_relative_eq!(row.j, r.w0, max_relative = 1e-12);
    assert_relative_eq!(row.w, r.w0, max_relative = 1e-6);
    assert!(row.v < 1e-12, "V(0) = {:e}", row.v);
    assert_eq!(row.dz_rho1_max, 0.0);

    // ρ₁ = 1 at t = 0: indicator is the window integral of (w¹₀)².
    let f = &r.history.families[0];
    let (z, w): (Vec<f64>, Vec<f64>) = f
        .seeds
        .iter()
        .zip(&f.steps[0])
        .filter(|(&z, _)| z >= r.z0 && z <= 2.0 * r.eta)
        .map(|(&z, rec)| (z, rec.w))
        .unzip();
    let ones = vec![1.0; z.len()];
    let expect = blowup_indicator(&z, &w, &ones, r.z0, 2.0 * r.eta, 1e-4);
    assert!(row.blowup > 0.0 && row.blowup <= expect);
}

#[test]
fn default_run_shock_time_and_envelopes() {
    let r = default_run();
    assert_eq!(r.stop, StopReason::Shock);
    let s = &r.shock;
    let n = s.normalized_t_star.unwrap();
    assert!(s.in_window, "T*|c11|W0 = {n}");
    assert!(s.bracket_low <= s.bracket_high);
    assert!(s.envelope_ok, "envelope excess {}", s.envelope_excess);
    assert!(s.z_shock.is_some());
}

#[test]
fn default_run_invariants() {
    let r = default_run();
    let c = &r.checks;
    assert!(c.product_identity_max <= 1e-6 * r.w0, "|v - rho w| = {:e}", c.product_identity_max);
    assert!(c.smin >= 0.49, "Smin {}", c.smin);
    assert!(c.sentinel_rho_min >= 0.99 - 1e-3, "sentinel rho {}", c.sentinel_rho_min);
    assert!(c.w_ratio_before_t0 <= 1.0 + r.config.epsilon, "W/W0 before t0 = {}", c.w_ratio_before_t0);
    assert!(c.v_max <= c.v_bound, "V = {:e} > {:e}", c.v_max, c.v_bound);
    assert!(c.strips_disjoint_after_t0);
    assert!(c.lambda23_max <= r.config.epsilon);
    assert!(c.blowup_monotone_after_t0);
    for row in &r.series {
        assert!(row.s >= row.smin && row.smin > 0.0);
        assert!(row.w >= row.v);
    }
    let fit = r.shock.log_fit.unwrap();
    assert!(fit.slope > 0.0 && fit.r2 > 0.9, "{fit:?}");
}

#[test]
fn bichar_meeting_times_on_default_run() {
    let r = default_run();
    let h = &r.history;
    let eta = r.eta;
    for (i, j, yi, yj) in [(0, 5, 1.3 * eta, 1.6 * eta), (0, 3, 1.2 * eta, 1.7 * eta), (2, 5, 1.4 * eta, 1.5 * eta)] {
        let p = h.bichar_time(i, j, yi, yj).unwrap();
        assert!(p.residual < 1e-9 * eta);
        let d = 1e-3 * eta;
        let fd = (h.bichar_time(i, j, yi + d, yj).unwrap().t - h.bichar_time(i, j, yi - d, yj).unwrap().t) / (2.0 * d);
        let (pi, pj) = (h.profile_at(i, p.t).unwrap(), h.profile_at(j, p.t).unwrap());
        let col = |prof: &[NodeRec], get: fn(&NodeRec) -> f64| prof.iter().map(get).collect::<Vec<_>>();
        let rho = interp_cubic(&h.families[i].seeds, &col(&pi, |r| r.rho), yi).0;
        let li = interp_cubic(&h.families[i].seeds, &col(&pi, |r| r.lambda), yi).0;
        let lj = interp_cubic(&h.families[j].seeds, &col(&pj, |r| r.lambda), yj).0;
        let pred = rho / (lj - li);
        assert!((fd - pred).abs() <= 1e-4 * pred.abs(), "{i}{j}: fd {fd} vs {pred}");
    }
    assert!(matches!(h.bichar_time(1, 1, eta, eta), Err(SolverError::SameFamily(1))));
    // Families moving apart never meet.
    assert!(matches!(h.bichar_time(0, 5, 1.8 * eta, 1.2 * eta), Err(SolverError::NoCrossing { .. })));
}

#[test]
fn rho_decomposition_at_half_shock_time() {
    let r = default_run();
    // The ±τ trace spans about one node spacing in the label.
    let spacing = r.eta / (r.config.nodes_family1 - 1) as f64;
    let tau = spacing / (8.0 * 2.0);
    let rep = r.history.rhod_check(0.5 * r.shock.t_star.unwrap(), tau).unwrap();
    assert!(rep.points.len() > 10);
    assert!(rep.max_rel_error <= 0.05, "max rel error {}", rep.max_rel_error);
}

#[test]
fn frozen_speed_bichar_is_exact() {
    let seeds: Vec<f64> = (0..11).map(|k| 1.0 + 0.1 * k as f64).collect();
    let times: Vec<f64> = (0..21).map(|n| 0.05 * n as f64).collect();
    let fam = |family: usize, lam: f64| FamilyHistory {
        family,
        seeds: seeds.clone(),
        in_support: vec![true; seeds.len()],
        steps: times
            .iter()
            .map(|&t| {
                seeds
                    .iter()
                    .map(|&z| NodeRec { x: z + lam * t, rho: 1.0, w: 0.0, v: 0.0, lambda: lam, drho: 0.0, phi: [0.0; 6] })
                    .collect()
            })
            .collect(),
    };
    let families = vec![fam(0, 2.0), fam(5, -2.0)];
    let h = History { times, families };
    let (yi, yj) = (1.23, 1.91);
    let p = h.bichar_time(0, 1, yi, yj).unwrap();
    assert_relative_eq!(p.t, (yj - yi) / 4.0, max_relative = 1e-13);
    assert_relative_eq!(p.x, yi + 2.0 * p.t, max_relative = 1e-13);
}

#[test]
fn dz_rho1_and_fit_helpers() {
    let z: Vec<f64> = vec![0.0, 0.1, 0.25, 0.3, 0.7];
    assert_eq!(dz_rho1(&z, &[1.0; 5]), 0.0);
    let lin: Vec<f64> = z.iter().map(|x| 3.0 - 2.0 * x).collect();
    assert_relative_eq!(dz_rho1(&z, &lin), 2.0, max_relative = 1e-13);
    let fit = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
    assert_relative_eq!(fit.slope, 2.0);
    assert_relative_eq!(fit.r2, 1.0);
    let (lo, hi) = shock_bracket(-0.75, 0.05, 0.01);
    assert!(lo < 1.0 / 0.0375 && 1.0 / 0.0375 < hi);
    let (l, u) = rho_envelopes(0.0, -0.75, 0.05, 0.01);
    assert_relative_eq!(l, 0.99);
    assert_relative_eq!(u, 1.01);
}

#[test]
fn half_spacing_changes_shock_time_by_less_than_two_percent() {
    let (params, data) = default_setup();
    let fine = SolverConfig { cells_per_eta: 800.0, ..SolverConfig::default() };
    let r = simulate(&params, &data, &fine, &RunOptions::default()).unwrap();
    let (a, b) = (default_run().shock.t_star.unwrap(), r.shock.t_star.unwrap());
    assert!((a - b).abs() / a < 0.02, "T* {a} vs {b}");
}

proptest! {
    #[test]
    fn section_weight_bounded(x in 0.0f64..1.0, eta in 1e-3f64..1.0) {
        let z = eta * (1.0 + x);
        prop_assert!(section_weight_2d(z, eta) <= 0.5 * eta + 1e-15);
    }

    #[test]
    fn cubic_interpolation_reproduces_cubics(a in -1.0f64..1.0, b in -1.0f64..1.0, x in 0.0f64..3.0) {
        let xs = [0.0, 0.7, 1.5, 2.2, 3.0];
        let f = |t: f64| a * t * t * t + b * t - 0.5;
        let ys: Vec<f64> = xs.iter().map(|&t| f(t)).collect();
        let (v, d) = interp_cubic(&xs, &ys, x);
        prop_assert!((v - f(x)).abs() < 1e-12);
        prop_assert!((d - (3.0 * a * x * x + b)).abs() < 1e-10);
    }

    #[test]
    fn euler_step_preserves_constants(c in prop::array::uniform6(-5e-3f64..5e-3)) {
        let p = MaterialParams::desk_default(DimMode::Planar3D);
        let mut g = EulerGrid::new(0.0, 1e-3, vec![c; 40]);
        g.step(2e-4, 2.1, &p);
        prop_assert!(g.phi.iter().all(|v| v == &c));
    }
}
