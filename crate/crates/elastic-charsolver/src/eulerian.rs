use elastic_model::{apply_a, frame6, lambda_max, MaterialParams, Normalization, Vec6};

use crate::error::SolverError;

/// MUSCL–Hancock on ∂ₜΦ + A(Φ)∂ₓΦ = 0 with a Rusanov fluctuation split.
/// Slopes use the monotonized-central limiter; the outermost cells carry zero slope, which
/// together with copied ghost cells gives outflow boundaries.
#[derive(Debug, Clone)]
pub struct EulerGrid {
    /// Centre of cell 0.
    pub x0: f64,
    pub dx: f64,
    pub phi: Vec<Vec6>,
    slope: Vec<Vec6>,
    pred: Vec<Vec6>,
}

/// Monotonized-central limited slope from the one-sided differences.
#[inline]
fn limited(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else {
        let m = (2.0 * a.abs()).min(2.0 * b.abs()).min(0.5 * (a + b).abs());
        m.copysign(a)
    }
}

impl EulerGrid {
    pub fn new(x0: f64, dx: f64, phi: Vec<Vec6>) -> Self {
        let n = phi.len();
        EulerGrid { x0, dx, phi, slope: vec![[0.0; 6]; n], pred: vec![[0.0; 6]; n] }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn x_right(&self) -> f64 {
        self.x(self.len() - 1)
    }

    /// Largest characteristic speed on the grid.
    pub fn max_speed(&self, params: &MaterialParams) -> f64 {
        self.phi.iter().map(|p| lambda_max(p, params)).fold(0.0, f64::max)
    }

    pub fn max_amplitude(&self) -> (usize, f64) {
        self.phi
            .iter()
            .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
            .enumerate()
            .fold((0, 0.0), |acc, (j, a)| if a > acc.1 { (j, a) } else { acc })
    }

    /// One step of size `dt`; `alpha` bounds |λ| on the grid.
    pub fn step(&mut self, dt: f64, alpha: f64, params: &MaterialParams) {
        let n = self.len();
        if n < 3 {
            return;
        }
        let half = 0.5 * dt / self.dx;
        for j in 0..n {
            let s: Vec6 = if j == 0 || j == n - 1 {
                [0.0; 6]
            } else {
                let (a, b, c) = (&self.phi[j - 1], &self.phi[j], &self.phi[j + 1]);
                std::array::from_fn(|k| limited(b[k] - a[k], c[k] - b[k]))
            };
            let a_s = apply_a(&self.phi[j], params, &s);
            let p = &self.phi[j];
            self.pred[j] = std::array::from_fn(|k| p[k] - half * a_s[k]);
            self.slope[j] = s;
        }
        let r = dt / self.dx;
        let mut dplus_prev = [0.0; 6];
        for j in 0..n {
            let (pj, sj) = (self.pred[j], self.slope[j]);
            let mut dminus = [0.0; 6];
            let mut dplus = [0.0; 6];
            if j + 1 < n {
                let (pn, sn) = (&self.pred[j + 1], &self.slope[j + 1]);
                let left: Vec6 = std::array::from_fn(|k| pj[k] + 0.5 * sj[k]);
                let right: Vec6 = std::array::from_fn(|k| pn[k] - 0.5 * sn[k]);
                let jump: Vec6 = std::array::from_fn(|k| right[k] - left[k]);
                let mean: Vec6 = std::array::from_fn(|k| 0.5 * (left[k] + right[k]));
                let aj = apply_a(&mean, params, &jump);
                for k in 0..6 {
                    dminus[k] = 0.5 * (aj[k] - alpha * jump[k]);
                    dplus[k] = 0.5 * (aj[k] + alpha * jump[k]);
                }
            }
            let inner = apply_a(&pj, params, &sj);
            let cell = &mut self.phi[j];
            for k in 0..6 {
                cell[k] -= r * (dplus_prev[k] + dminus[k] + inner[k]);
            }
            dplus_prev = dplus;
        }
    }

    /// Drops the leftmost cell and appends a copy of the rightmost one.
    pub fn slide_right(&mut self) {
        let last = *self.phi.last().expect("non-empty grid");
        self.phi.remove(0);
        self.phi.push(last);
        self.x0 += self.dx;
    }

    /// Sub-window of cells `lo..=hi`.
    pub fn window(&self, lo: usize, hi: usize) -> EulerGrid {
        EulerGrid::new(self.x(lo), self.dx, self.phi[lo..=hi].to_vec())
    }

    /// Φ and ∂ₓΦ at `x` by cubic interpolation of cell values and of
    /// fourth-order central differences; `None` too close to the edges.
    pub fn sample(&self, x: f64) -> Option<(Vec6, Vec6)> {
        let n = self.len() as isize;
        let t = (x - self.x0) / self.dx;
        if !t.is_finite() {
            return None;
        }
        let j = t.floor() as isize;
        if j - 1 < 2 || j + 2 > n - 3 {
            return None;
        }
        let s = t - j as f64;
        let w = [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ];
        let inv = 1.0 / (12.0 * self.dx);
        let mut phi = [0.0; 6];
        let mut d = [0.0; 6];
        for (q, wq) in w.iter().enumerate() {
            let k = (j - 1 + q as isize) as usize;
            let (m2, m1, c, p1, p2) =
                (&self.phi[k - 2], &self.phi[k - 1], &self.phi[k], &self.phi[k + 1], &self.phi[k + 2]);
            for a in 0..6 {
                phi[a] += wq * c[a];
                d[a] += wq * inv * (m2[a] - 8.0 * m1[a] + 8.0 * p1[a] - p2[a]);
            }
        }
        Some((phi, d))
    }

    /// Edge value used outside the window (the field is constant there).
    pub fn edge_value(&self, x: f64) -> Vec6 {
        if x < self.x0 {
            self.phi[0]
        } else {
            *self.phi.last().expect("non-empty grid")
        }
    }

    /// Wave amplitudes lᵐ·∂ₓΦ at cell `j` (fourth-order differences,
    /// second order next to the edges, zero at the edge cells).
    pub fn waves_at(&self, j: usize, params: &MaterialParams, reference: [f64; 2]) -> ([f64; 6], [f64; 2]) {
        let n = self.len();
        let d: Vec6 = if j >= 2 && j + 2 < n {
            let inv = 1.0 / (12.0 * self.dx);
            std::array::from_fn(|a| {
                inv * (self.phi[j - 2][a] - 8.0 * self.phi[j - 1][a] + 8.0 * self.phi[j + 1][a]
                    - self.phi[j + 2][a])
            })
        } else if j >= 1 && j + 1 < n {
            std::array::from_fn(|a| (self.phi[j + 1][a] - self.phi[j - 1][a]) / (2.0 * self.dx))
        } else {
            [0.0; 6]
        };
        let f = frame6(&self.phi[j], params, Normalization::UnitPolarization, reference);
        let w = std::array::from_fn(|m| (0..6).map(|a| f.l[m][a] * d[a]).sum());
        (w, f.dir)
    }

    pub fn check(&self, t: f64, params: &MaterialParams) -> Result<(), SolverError> {
        if self.phi.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(SolverError::NotFinite { what: "Eulerian field".into(), t });
        }
        let (j, amp) = self.max_amplitude();
        let limit = params.ball_radius();
        if amp > limit {
            return Err(SolverError::AmplitudeExit { t, x: self.x(j), amplitude: amp, limit });
        }
        Ok(())
    }
}
