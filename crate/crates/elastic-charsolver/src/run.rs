use elastic_initdata::{reconstruct_phi0, InitialFamilies};
use elastic_model::{frame6, norm, DimMode, MaterialParams, Normalization, Vec6, FAMILIES_2D};
use serde::{Deserialize, Serialize};

use crate::config::{RunOptions, SolverConfig};
use crate::diagnostics::{blowup_indicator, dz_rho1, linear_fit, rho_envelopes, shock_bracket, LinearFit};
use crate::error::SolverError;
use crate::eulerian::EulerGrid;
use crate::geometry::{separation_time, strip_groups};
use crate::history::{FamilyHistory, History, NodeRec};
use crate::nodes::{freeze, node_rhs, Frozen, NodeEval, NodeVars};

/// Sentinel seeds sit this far (in units of η) outside the support.
const SENTINEL_OFFSET: f64 = 0.05;
/// Margin of the wide window beyond the fastest reach, in units of η.
const WIDE_MARGIN: f64 = 0.3;
/// Gap between the first-family front sentinel and the narrow-window edge.
const FRONT_MARGIN: f64 = 0.2;
/// Envelope slack on ρ₁(z₀, t).
pub const ENVELOPE_SLACK: f64 = 0.05;
/// Macro steps in the wide window are at most t_h / this.
const WIDE_STEPS: f64 = 60.0;

/// The reconstruction needs at least this many cells per η to meet its
/// consistency tolerance; coarser grids are sampled from a refined one.
const RECONSTRUCT_CELLS_PER_ETA: f64 = 400.0;

/// Φ(x, 0) at x0 + j·dx, j < n.
pub fn initial_phi(
    data: &InitialFamilies,
    params: &MaterialParams,
    x0: f64,
    dx: f64,
    n: usize,
) -> Result<Vec<Vec6>, SolverError> {
    if n == 0 {
        return Err(SolverError::Config("empty grid".into()));
    }
    let k = (RECONSTRUCT_CELLS_PER_ETA * dx / data.eta - 1e-9).ceil().max(1.0) as usize;
    let h = dx / k as f64;
    let xs: Vec<f64> = (0..(n - 1) * k + 1).map(|j| x0 + j as f64 * h).collect();
    let rec = reconstruct_phi0(&data.profiles, params, &xs)?;
    Ok(rec.phi.into_iter().step_by(k).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub t: f64,
    pub x0: f64,
    pub dx: f64,
    pub phi: Vec<Vec6>,
}

impl FieldSnapshot {
    fn of(t: f64, g: &EulerGrid) -> Self {
        FieldSnapshot { t, x0: g.x0, dx: g.dx, phi: g.phi.clone() }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub rho1_min: f64,
    pub s: f64,
    pub j: f64,
    pub w: f64,
    pub v: f64,
    /// V₁, V_2̄, V_5̄, V₆ (entries of absent groups are zero in 2D).
    pub v_parts: [f64; 4],
    pub ubar: f64,
    pub smin: f64,
    pub blowup: f64,
    pub dz_rho1_max: f64,
    pub rho1_z0: f64,
    pub product_error: f64,
    pub sentinel_rho_min: f64,
    pub lambda23_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Shock,
    TimeCap,
    StopAt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockReport {
    pub t_star: Option<f64>,
    pub bracket_low: f64,
    pub bracket_high: f64,
    /// T*·|c₁₁(0)|·W₀.
    pub normalized_t_star: Option<f64>,
    /// Acceptance window for the normalized time (bracket widened by 5%).
    pub normalized_window: [f64; 2],
    pub in_window: bool,
    pub z_shock: Option<f64>,
    pub rho1_min_series: Vec<(f64, f64)>,
    pub blowup_series: Vec<(f64, f64)>,
    pub dz_rho1_max: Vec<(f64, f64)>,
    pub separation_time: f64,
    pub w0: f64,
    pub z0: f64,
    pub c11_zero: f64,
    pub envelope_ok: bool,
    /// Largest excursion of ρ₁(z₀, t) beyond an envelope (≤ 0 inside).
    pub envelope_excess: f64,
    /// Indicator against −ln ρ₁min over the final decade of ρ₁ decay.
    pub log_fit: Option<LinearFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunChecks {
    pub product_identity_max: f64,
    pub strips_disjoint_after_t0: bool,
    pub lambda23_max: f64,
    /// max W(t)/W₀ for t ≤ t₀.
    pub w_ratio_before_t0: f64,
    pub smin: f64,
    pub sentinel_rho_min: f64,
    pub v_max: f64,
    pub v_bound: f64,
    pub blowup_monotone_after_t0: bool,
    pub dz_rho1_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: SolverConfig,
    pub dim_mode: DimMode,
    pub eta: f64,
    pub w0: f64,
    pub z0: f64,
    pub c11_zero: f64,
    pub t0: f64,
    pub t_handoff: f64,
    pub dx: f64,
    pub stop: StopReason,
    pub eulerian_steps: usize,
    pub series: Vec<SeriesRow>,
    pub shock: ShockReport,
    pub checks: RunChecks,
    pub snapshots: Vec<FieldSnapshot>,
    pub final_field: FieldSnapshot,
    pub history: History,
}

impl RunResult {
    pub fn t_end(&self) -> f64 {
        self.history.t_end()
    }
}

struct Family {
    fam: usize,
    seeds: Vec<f64>,
    in_support: Vec<bool>,
    y: Vec<NodeVars>,
    dir: Vec<[f64; 2]>,
    frozen: Vec<Option<Frozen>>,
    k1: Vec<NodeEval>,
}

fn mode_families(mode: DimMode) -> Vec<usize> {
    match mode {
        DimMode::Planar3D => (0..6).collect(),
        DimMode::Planar2D => FAMILIES_2D.to_vec(),
    }
}

fn reference(mode: DimMode) -> [f64; 2] {
    match mode {
        DimMode::Planar3D => [0.0, 1.0],
        DimMode::Planar2D => [1.0, 0.0],
    }
}

fn axpy(y: &NodeVars, h: f64, d: &NodeVars) -> NodeVars {
    std::array::from_fn(|q| y[q] + h * d[q])
}

impl Family {
    fn eval_all(&mut self, grid: &EulerGrid, params: &MaterialParams) {
        for k in 0..self.y.len() {
            self.k1[k] = node_rhs(self.fam, &self.y[k], self.dir[k], self.frozen[k].as_ref(), grid, params);
            self.dir[k] = self.k1[k].dir;
        }
    }

    fn rk4(&mut self, h: f64, mid: &EulerGrid, end: &EulerGrid, params: &MaterialParams) {
        for k in 0..self.y.len() {
            let (y, d, fz) = (self.y[k], self.dir[k], self.frozen[k].as_ref());
            let k1 = self.k1[k].dy;
            let k2 = node_rhs(self.fam, &axpy(&y, 0.5 * h, &k1), d, fz, mid, params).dy;
            let k3 = node_rhs(self.fam, &axpy(&y, 0.5 * h, &k2), d, fz, mid, params).dy;
            let k4 = node_rhs(self.fam, &axpy(&y, h, &k3), d, fz, end, params).dy;
            self.y[k] = std::array::from_fn(|q| y[q] + h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]));
        }
        self.eval_all(end, params);
    }

    fn record(&self) -> Vec<NodeRec> {
        self.y
            .iter()
            .zip(&self.k1)
            .map(|(y, e)| NodeRec { x: y[0], rho: y[1], w: y[2], v: y[3], lambda: e.lambda, drho: e.dy[1], phi: e.phi })
            .collect()
    }

    /// Index of the node seeded at `z` (exact match).
    fn node(&self, z: f64) -> usize {
        self.seeds.iter().position(|&s| s == z).expect("seed present")
    }
}

/// Advances the Eulerian field over `h` in `m` equal steps, sliding the
/// window when `anchor` = (x, speed, margin) is given. Returns the field
/// after m/2 steps.
fn advance_field(
    grid: &mut EulerGrid,
    h: f64,
    m: usize,
    t: f64,
    params: &MaterialParams,
    anchor: Option<(f64, f64, f64)>,
) -> Result<EulerGrid, SolverError> {
    let dt = h / m as f64;
    let alpha = 1.01 * grid.max_speed(params);
    let cfl = alpha * dt / grid.dx;
    if cfl > 0.9 {
        return Err(SolverError::Cfl { cfl, limit: 0.9, t });
    }
    let mut mid = None;
    for s in 0..m {
        if let Some((x, speed, margin)) = anchor {
            let target = x + speed * (s + 1) as f64 * dt + margin;
            while grid.x_right() < target {
                grid.slide_right();
            }
        }
        grid.step(dt, alpha, params);
        if s + 1 == m / 2 {
            mid = Some(grid.clone());
        }
    }
    Ok(mid.expect("m is even"))
}

/// Runs the hybrid solver from the given data until ρ₁ reaches
/// `rho_stop`, the time cap, or `opts.stop_at`.
pub fn simulate(
    params: &MaterialParams,
    data: &InitialFamilies,
    cfg: &SolverConfig,
    opts: &RunOptions,
) -> Result<RunResult, SolverError> {
    cfg.validate()?;
    params.validate()?;
    if data.mode != params.dim_mode {
        return Err(SolverError::Config("data and material dimension modes differ".into()));
    }
    let mode = params.dim_mode;
    let eta = data.eta;
    let (w0, z0) = (data.w0, data.z0);
    let c11 = params.c11_at_zero();
    let eps = cfg.epsilon;
    let t0 = separation_time(eta, params)?;
    let t_handoff = cfg.handoff_factor * t0;
    let t_est = 1.0 / (c11.abs() * w0);
    let t_max = cfg.t_max_factor * t_est;
    let stop_at = opts.stop_at.unwrap_or(f64::INFINITY).min(t_max);

    // Wide window and initial field.
    let dx = eta / cfg.cells_per_eta;
    let reach = 1.05 * params.c1 * t_handoff.min(stop_at);
    let left = eta - reach - WIDE_MARGIN * eta;
    let right = 2.0 * eta + reach + WIDE_MARGIN * eta;
    let ncell = ((right - left) / dx).ceil() as usize + 1;
    let phi0 = initial_phi(data, params, left, dx, ncell)?;
    let mut grid = EulerGrid::new(left, dx, phi0);
    let dt_e = cfg.dt_cfl * dx / params.c1;

    // Characteristic nodes.
    let fams = mode_families(mode);
    let r0 = reference(mode);
    let lo_s = (1.0 - SENTINEL_OFFSET) * eta;
    let hi_s = (2.0 + SENTINEL_OFFSET) * eta;
    let mut families: Vec<Family> = fams
        .iter()
        .enumerate()
        .map(|(p, &fam)| {
            let n = if p == 0 { cfg.nodes_family1 } else { cfg.nodes_other };
            let mut seeds: Vec<f64> = (0..n).map(|k| eta * (1.0 + k as f64 / (n - 1) as f64)).collect();
            if p == 0 && !seeds.contains(&z0) {
                seeds.push(z0);
            }
            seeds.push(lo_s);
            seeds.push(hi_s);
            seeds.sort_by(f64::total_cmp);
            let in_support = seeds.iter().map(|&z| z >= eta && z <= 2.0 * eta).collect();
            let y = seeds
                .iter()
                .map(|&z| {
                    let w = data.profiles[p].value(z);
                    [z, 1.0, w, w]
                })
                .collect::<Vec<NodeVars>>();
            let len = seeds.len();
            let dummy = NodeEval { dy: [0.0; 4], lambda: 0.0, phi: [0.0; 6], dir: r0 };
            Family { fam, seeds, in_support, y, dir: vec![r0; len], frozen: vec![None; len], k1: vec![dummy; len] }
        })
        .collect();
    for f in families.iter_mut() {
        f.eval_all(&grid, params);
    }

    let groups = strip_groups(mode);
    let group_of: Vec<usize> = fams
        .iter()
        .map(|&fam| groups.iter().position(|g| g.contains(&fam)).expect("family grouped"))
        .collect();
    // Seeds of the blow-up window (z₀, z₀*].
    let z0_star = families[0]
        .seeds
        .iter()
        .zip(&families[0].in_support)
        .filter(|(&z, &s)| s && z >= z0 && data.profiles[0].value(z) > 0.5 * w0)
        .map(|(&z, _)| z)
        .fold(z0, f64::max);
    let z0_node = families[0].node(z0);
    let front = families[0].node(hi_s);

    let mut state = Tracker::new(cfg, w0, t0);
    let mut history = History {
        times: vec![],
        families: families
            .iter()
            .map(|f| FamilyHistory {
                family: f.fam,
                seeds: f.seeds.clone(),
                in_support: f.in_support.clone(),
                steps: vec![],
            })
            .collect(),
    };
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = opts.snapshot_times.iter().copied().filter(|s| *s >= 0.0).collect();
    pending.sort_by(f64::total_cmp);
    let mut t = 0.0;
    let mut eulerian_steps = 0usize;
    let mut narrow = false;
    let stop;

    let ctx = DiagCtx { params, mode, eta, z0_node, z0, z0_star, group_of: &group_of, groups: &groups, c11, w0, eps };
    let mut shock_t = None;
    let mut z_shock = None;
    loop {
        // Record and diagnose the current state.
        history.times.push(t);
        for (f, h) in families.iter().zip(history.families.iter_mut()) {
            h.steps.push(f.record());
        }
        while pending.first().is_some_and(|&s| s <= t + 1e-12 * t.max(1.0)) {
            pending.remove(0);
            snapshots.push(FieldSnapshot::of(t, &grid));
        }
        let (rho1_min, kmin) = state.observe(t, &families, &grid, &ctx);
        if rho1_min < cfg.rho_stop {
            let hist = &history.families[0].steps;
            let n = hist.len();
            let (r1, r0_) = (hist[n - 1][kmin].rho, hist[n - 2][kmin].rho);
            let (ta, tb) = (history.times[n - 2], history.times[n - 1]);
            let slope = (r1 - r0_) / (tb - ta);
            shock_t = Some(if slope < 0.0 { tb - r1 / slope } else { tb });
            z_shock = Some(families[0].seeds[kmin]);
            stop = StopReason::Shock;
            break;
        }
        if t >= stop_at * (1.0 - 1e-14) {
            stop = if opts.stop_at.is_some_and(|s| s <= t_max) { StopReason::StopAt } else { StopReason::TimeCap };
            break;
        }

        // Macro step size.
        let mut h = t_est / cfg.macro_steps;
        let f1 = &families[0];
        for k in 0..f1.y.len() {
            let (rho, d) = (f1.y[k][1], f1.k1[k].dy[1]);
            if f1.in_support[k] && d < 0.0 {
                h = h.min(cfg.kappa * rho / -d);
            }
        }
        if !narrow {
            h = h.min(t_handoff / WIDE_STEPS);
        }
        let mut events = vec![stop_at];
        if !narrow {
            events.push(t_handoff);
        }
        events.extend(pending.iter().copied());
        for e in events {
            if e > t && t + h > e - 0.25 * h {
                h = e - t;
            }
        }
        let m = 2 * ((h / dt_e / 2.0).ceil() as usize).max(1);
        let anchor = narrow.then(|| {
            let s = &families[0];
            (s.y[front][0], s.k1[front].lambda, FRONT_MARGIN * eta)
        });
        let mid = advance_field(&mut grid, h, m, t, params, anchor)?;
        eulerian_steps += m;
        for f in families.iter_mut() {
            f.rk4(h, &mid, &grid, params);
        }
        t += h;
        grid.check(t, params)?;
        for f in &families {
            if f.y.iter().flatten().any(|v| !v.is_finite()) {
                return Err(SolverError::NotFinite { what: format!("family {} nodes", f.fam + 1), t });
            }
        }

        if !narrow && t >= t_handoff * (1.0 - 1e-14) && t < stop_at * (1.0 - 1e-14) {
            for f in families.iter_mut().skip(1) {
                for k in 0..f.y.len() {
                    f.frozen[k] = Some(freeze(f.fam, f.y[k][0], f.dir[k], &grid, params));
                }
                f.eval_all(&grid, params);
            }
            let target = families[0].y[front][0] + FRONT_MARGIN * eta;
            let n_b = (cfg.window_eta * cfg.cells_per_eta).round() as usize;
            let hi = ((target - grid.x0) / dx).ceil() as usize;
            if hi >= grid.len() || hi + 1 < n_b {
                return Err(SolverError::Config("wide window too small for the handoff".into()));
            }
            grid = grid.window(hi + 1 - n_b, hi);
            narrow = true;
        }
    }

    let (bracket_low, bracket_high) = shock_bracket(c11, w0, eps);
    let window = [0.95 / (1.0 + eps).powi(3), 1.05 / (1.0 - eps).powi(4)];
    let normalized = shock_t.map(|ts| ts * c11.abs() * w0);
    let series = state.rows;
    let log_fit = shock_t.and_then(|_| {
        let pts: Vec<(f64, f64)> = series
            .iter()
            .filter(|r| r.rho1_min <= 10.0 * cfg.rho_stop)
            .map(|r| (-r.rho1_min.ln(), r.blowup))
            .collect();
        (pts.len() >= 3).then(|| {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            linear_fit(&x, &y)
        })
    });
    let shock = ShockReport {
        t_star: shock_t,
        bracket_low,
        bracket_high,
        normalized_t_star: normalized,
        normalized_window: window,
        in_window: normalized.is_some_and(|n| n >= window[0] && n <= window[1]),
        z_shock,
        rho1_min_series: series.iter().map(|r| (r.t, r.rho1_min)).collect(),
        blowup_series: series.iter().map(|r| (r.t, r.blowup)).collect(),
        dz_rho1_max: series.iter().map(|r| (r.t, r.dz_rho1_max)).collect(),
        separation_time: t0,
        w0,
        z0,
        c11_zero: c11,
        envelope_ok: state.envelope_excess <= 0.0,
        envelope_excess: state.envelope_excess,
        log_fit,
    };
    let mono = series
        .windows(2)
        .filter(|p| p[0].t > t0)
        .all(|p| p[1].blowup >= p[0].blowup * (1.0 - 1e-9));
    let checks = RunChecks {
        product_identity_max: series.iter().map(|r| r.product_error).fold(0.0, f64::max),
        strips_disjoint_after_t0: state.disjoint,
        lambda23_max: series.iter().map(|r| r.lambda23_max).fold(0.0, f64::max),
        w_ratio_before_t0: state.w_ratio_pre,
        smin: series.last().map_or(1.0, |r| r.smin),
        sentinel_rho_min: series.iter().map(|r| r.sentinel_rho_min).fold(f64::INFINITY, f64::min),
        v_max: series.iter().map(|r| r.v).fold(0.0, f64::max),
        v_bound: 20.0 * eta * w0 * w0,
        blowup_monotone_after_t0: mono,
        dz_rho1_sup: series.iter().map(|r| r.dz_rho1_max).fold(0.0, f64::max),
    };
    Ok(RunResult {
        config: cfg.clone(),
        dim_mode: mode,
        eta,
        w0,
        z0,
        c11_zero: c11,
        t0,
        t_handoff,
        dx,
        stop,
        eulerian_steps,
        series,
        shock,
        checks,
        snapshots,
        final_field: FieldSnapshot::of(t, &grid),
        history,
    })
}

struct DiagCtx<'a> {
    params: &'a MaterialParams,
    mode: DimMode,
    eta: f64,
    z0_node: usize,
    z0: f64,
    z0_star: f64,
    group_of: &'a [usize],
    groups: &'a [Vec<usize>],
    c11: f64,
    w0: f64,
    eps: f64,
}

/// Running sups and per-step diagnostics.
struct Tracker {
    rows: Vec<SeriesRow>,
    s: f64,
    j: f64,
    smin: f64,
    ubar: f64,
    w_ratio_pre: f64,
    disjoint: bool,
    envelope_excess: f64,
    rho_floor: f64,
    t0: f64,
}

impl Tracker {
    fn new(cfg: &SolverConfig, _w0: f64, t0: f64) -> Self {
        Tracker {
            rows: vec![],
            s: 0.0,
            j: 0.0,
            smin: f64::INFINITY,
            ubar: 0.0,
            w_ratio_pre: 0.0,
            disjoint: true,
            envelope_excess: f64::NEG_INFINITY,
            rho_floor: cfg.rho_stop / 10.0,
            t0,
        }
    }

    /// Appends a series row; returns (min ρ₁ over in-support nodes, its node).
    fn observe(&mut self, t: f64, fams: &[Family], grid: &EulerGrid, cx: &DiagCtx) -> (f64, usize) {
        let eta = cx.eta;
        let mut rho1_min = f64::INFINITY;
        let mut kmin = 0;
        let mut w = 0.0f64;
        let mut prod = 0.0f64;
        let mut sentinel = f64::INFINITY;
        let mut lam23 = 0.0f64;
        for (p, f) in fams.iter().enumerate() {
            for (k, y) in f.y.iter().enumerate() {
                let [_, rho, wi, v] = *y;
                w = w.max(wi.abs());
                prod = prod.max((v - rho * wi).abs());
                if f.in_support[k] {
                    self.s = self.s.max(rho);
                    self.j = self.j.max(v.abs());
                    if p == 0 {
                        if rho < rho1_min {
                            rho1_min = rho;
                            kmin = k;
                        }
                    } else {
                        self.smin = self.smin.min(rho);
                    }
                } else {
                    sentinel = sentinel.min(rho);
                }
                if cx.mode == DimMode::Planar3D {
                    let fr = frame6(&f.k1[k].phi, cx.params, Normalization::UnitPolarization, f.dir[k]);
                    lam23 = lam23.max((fr.lambda[1] - fr.lambda[2]).abs());
                }
            }
        }

        // Strip intervals from the nodes seeded at η and 2η.
        let ng = cx.groups.len();
        let mut strip = vec![(f64::INFINITY, f64::NEG_INFINITY); ng];
        for (p, f) in fams.iter().enumerate() {
            let a = f.y[f.node(eta)][0];
            let b = f.y[f.node(2.0 * eta)][0];
            let (lo, hi) = (a.min(b), a.max(b));
            let g = cx.group_of[p];
            strip[g] = (strip[g].0.min(lo), strip[g].1.max(hi));
        }
        if t > self.t0 {
            for g in 0..ng - 1 {
                if !(strip[g].0 > strip[g + 1].1) {
                    self.disjoint = false;
                }
            }
        }

        // Eulerian sweep: W, V, Ubar.
        let mut v_parts = [0.0f64; 4];
        let mut dir = reference(cx.mode);
        for jx in 0..grid.len() {
            let x = grid.x(jx);
            let (wv, d) = grid.waves_at(jx, cx.params, dir);
            dir = d;
            self.ubar = self.ubar.max(norm(&grid.phi[jx]));
            for (p, f) in fams.iter().enumerate() {
                let a = wv[f.fam].abs();
                w = w.max(a);
                let g = cx.group_of[p];
                let slot = match cx.mode {
                    DimMode::Planar3D => g,
                    DimMode::Planar2D => [0, 1, 2, 3][g],
                };
                if x < strip[g].0 || x > strip[g].1 {
                    v_parts[slot] = v_parts[slot].max(a);
                }
            }
        }
        if t <= self.t0 {
            self.w_ratio_pre = self.w_ratio_pre.max(w / cx.w0);
        }

        // First-family quantities.
        let f1 = &fams[0];
        let sup_idx: Vec<usize> = (0..f1.y.len()).filter(|&k| f1.in_support[k]).collect();
        let z: Vec<f64> = sup_idx.iter().map(|&k| f1.seeds[k]).collect();
        let rho: Vec<f64> = sup_idx.iter().map(|&k| f1.y[k][1]).collect();
        let v: Vec<f64> = sup_idx.iter().map(|&k| f1.y[k][3]).collect();
        let dz = dz_rho1(&z, &rho);
        let blow = blowup_indicator(&z, &v, &rho, cx.z0, cx.z0_star, self.rho_floor);
        let rho_z0 = f1.y[cx.z0_node][1];
        let (lower, upper) = rho_envelopes(t, cx.c11, cx.w0, cx.eps);
        let excess = (lower - ENVELOPE_SLACK - rho_z0).max(rho_z0 - upper - ENVELOPE_SLACK);
        self.envelope_excess = self.envelope_excess.max(excess);

        self.rows.push(SeriesRow {
            t,
            rho1_min,
            s: self.s,
            j: self.j,
            w,
            v: v_parts.iter().copied().fold(0.0, f64::max),
            v_parts,
            ubar: self.ubar,
            smin: if self.smin.is_finite() { self.smin } else { 1.0 },
            blowup: blow,
            dz_rho1_max: dz,
            rho1_z0: rho_z0,
            product_error: prod,
            sentinel_rho_min: sentinel,
            lambda23_max: lam23,
        });
        (rho1_min, kmin)
    }
}
