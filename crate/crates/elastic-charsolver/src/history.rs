use elastic_model::Vec6;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;

/// Node variables recorded after each macro step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRec {
    pub x: f64,
    pub rho: f64,
    pub w: f64,
    pub v: f64,
    pub lambda: f64,
    /// ∂ₜρ along the characteristic.
    pub drho: f64,
    pub phi: Vec6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyHistory {
    /// Embedded family index (0..6).
    pub family: usize,
    /// Seed positions, increasing.
    pub seeds: Vec<f64>,
    pub in_support: Vec<bool>,
    /// `steps[n][k]`: node k after step n.
    pub steps: Vec<Vec<NodeRec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub times: Vec<f64>,
    pub families: Vec<FamilyHistory>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicharPoint {
    pub t: f64,
    pub x: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhodPoint {
    pub z: f64,
    /// ∂_z ρ₁ at fixed time.
    pub dz: f64,
    /// ∂_{y₁}ρ₁ along the 6-characteristic.
    pub dy: f64,
    /// (ρ₁/(2λ₁)) ∂_s ρ₁.
    pub transport: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhodReport {
    pub t: f64,
    pub tau: f64,
    pub sup_dz: f64,
    pub points: Vec<RhodPoint>,
    pub max_rel_error: f64,
}

/// Value and derivative of the cubic through four points.
pub fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> (f64, f64) {
    let mut val = 0.0;
    let mut der = 0.0;
    for a in 0..4 {
        let mut basis = 1.0;
        let mut dbasis = 0.0;
        for b in 0..4 {
            if b == a {
                continue;
            }
            let den = xs[a] - xs[b];
            // Product rule accumulated term by term.
            dbasis = dbasis * (x - xs[b]) / den + basis / den;
            basis *= (x - xs[b]) / den;
        }
        val += ys[a] * basis;
        der += ys[a] * dbasis;
    }
    (val, der)
}

/// Start of the four-point stencil around `x` in the sorted `xs`.
fn stencil(xs: &[f64], x: f64) -> usize {
    let k = xs.partition_point(|&v| v <= x).saturating_sub(1);
    k.saturating_sub(1).min(xs.len().saturating_sub(4))
}

/// Piecewise-cubic value and derivative of tabulated `ys` at `x`.
pub fn interp_cubic(xs: &[f64], ys: &[f64], x: f64) -> (f64, f64) {
    if xs.len() < 4 {
        let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
        let s = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
        return (ys[k - 1] + s * (x - xs[k - 1]), s);
    }
    let s = stencil(xs, x);
    lagrange4(&xs[s..s + 4], &ys[s..s + 4], x)
}

fn hermite(t0: f64, t1: f64, y0: f64, d0: f64, y1: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

impl History {
    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    fn interval(&self, t: f64) -> Result<usize, SolverError> {
        let n = self.times.len();
        if n < 2 || t < self.times[0] || t > self.times[n - 1] {
            return Err(SolverError::OutOfRange(format!(
                "t = {t} outside [{}, {}]",
                self.times.first().unwrap_or(&0.0),
                self.t_end()
            )));
        }
        Ok(self.times.partition_point(|&s| s <= t).clamp(1, n - 1) - 1)
    }

    /// Node k of family f at time t: X and ρ by Hermite interpolation with
    /// their stored time derivatives, the rest by cubics in t.
    pub fn node_at(&self, f: usize, k: usize, t: f64) -> Result<NodeRec, SolverError> {
        let n = self.interval(t)?;
        let fam = &self.families[f];
        let (a, b) = (&fam.steps[n][k], &fam.steps[n + 1][k]);
        let (t0, t1) = (self.times[n], self.times[n + 1]);
        let cubic_t = |get: &dyn Fn(&NodeRec) -> f64| -> f64 {
            let len = self.times.len();
            if len < 4 {
                let s = (t - t0) / (t1 - t0);
                return (1.0 - s) * get(a) + s * get(b);
            }
            let s0 = n.saturating_sub(1).min(len - 4);
            let ys: Vec<f64> = (s0..s0 + 4).map(|q| get(&fam.steps[q][k])).collect();
            lagrange4(&self.times[s0..s0 + 4], &ys, t).0
        };
        let s = (t - t0) / (t1 - t0);
        Ok(NodeRec {
            x: hermite(t0, t1, a.x, a.lambda, b.x, b.lambda, t),
            rho: hermite(t0, t1, a.rho, a.drho, b.rho, b.drho, t),
            w: cubic_t(&|r| r.w),
            v: cubic_t(&|r| r.v),
            lambda: cubic_t(&|r| r.lambda),
            drho: cubic_t(&|r| r.drho),
            phi: std::array::from_fn(|j| (1.0 - s) * a.phi[j] + s * b.phi[j]),
        })
    }

    /// All nodes of family f at time t.
    pub fn profile_at(&self, f: usize, t: f64) -> Result<Vec<NodeRec>, SolverError> {
        (0..self.families[f].seeds.len()).map(|k| self.node_at(f, k, t)).collect()
    }

    /// Xᵢ(z, t) by cubic interpolation in the seed coordinate.
    pub fn position(&self, f: usize, z: f64, t: f64) -> Result<f64, SolverError> {
        let prof = self.profile_at(f, t)?;
        let xs: Vec<f64> = prof.iter().map(|r| r.x).collect();
        Ok(interp_cubic(&self.families[f].seeds, &xs, z).0)
    }

    /// The seed z with Xᵢ(z, t) = x (bisection; X is increasing in z).
    pub fn label_in(&self, f: usize, prof: &[NodeRec], x: f64) -> Result<f64, SolverError> {
        let seeds = &self.families[f].seeds;
        let xs: Vec<f64> = prof.iter().map(|r| r.x).collect();
        let (mut lo, mut hi) = (seeds[0], seeds[seeds.len() - 1]);
        if x < xs[0] || x > xs[xs.len() - 1] {
            return Err(SolverError::OutOfRange(format!("x = {x} outside the family-{} fan", f + 1)));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if interp_cubic(seeds, &xs, mid).0 < x {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * seeds[seeds.len() - 1].abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Meeting time t' of the characteristics of families `i` and `j`
    /// (positions in `families`) seeded at `yi` and `yj`.
    pub fn bichar_time(&self, i: usize, j: usize, yi: f64, yj: f64) -> Result<BicharPoint, SolverError> {
        if i == j {
            return Err(SolverError::SameFamily(i));
        }
        let g = |t: f64| -> Result<f64, SolverError> {
            Ok(self.position(i, yi, t)? - self.position(j, yj, t)?)
        };
        let mut ga = g(self.times[0])?;
        if ga == 0.0 {
            return Ok(BicharPoint { t: self.times[0], x: self.position(i, yi, self.times[0])?, residual: 0.0 });
        }
        for n in 0..self.times.len() - 1 {
            let gb = g(self.times[n + 1])?;
            if ga * gb <= 0.0 {
                let (mut a, mut b) = (self.times[n], self.times[n + 1]);
                let mut fa = ga;
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    let fm = g(m)?;
                    if fm == 0.0 {
                        a = m;
                        b = m;
                        break;
                    }
                    if fa * fm < 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                    if b - a < 1e-16 * b.abs().max(1e-300) {
                        break;
                    }
                }
                let t = 0.5 * (a + b);
                let xi = self.position(i, yi, t)?;
                let xj = self.position(j, yj, t)?;
                return Ok(BicharPoint { t, x: 0.5 * (xi + xj), residual: (xi - xj).abs() });
            }
            ga = gb;
        }
        Err(SolverError::NoCrossing { i, j })
    }

    /// Compares ∂_zρ₁ with ∂_{y₁}ρ₁ + (ρ₁/(2λ₁))∂_sρ₁ at time `t`, where
    /// ∂_{y₁} is taken along the 6-characteristic (speed −λ₁) through each
    /// node, by a centred difference over ±`tau`. Only nodes with
    /// |∂_zρ₁| above 10% of its sup are compared.
    pub fn rhod_check(&self, t: f64, tau: f64) -> Result<RhodReport, SolverError> {
        let f = 0;
        let fam = &self.families[f];
        let prof = self.profile_at(f, t)?;
        let rho: Vec<f64> = prof.iter().map(|r| r.rho).collect();
        let dz: Vec<f64> = fam.seeds.iter().map(|&z| interp_cubic(&fam.seeds, &rho, z).1).collect();
        let sup = (0..dz.len()).filter(|&k| fam.in_support[k]).map(|k| dz[k].abs()).fold(0.0, f64::max);
        let speed = |x: f64, s: f64| -> Result<f64, SolverError> {
            let p = self.profile_at(f, s)?;
            let z = self.label_in(f, &p, x)?;
            let lam: Vec<f64> = p.iter().map(|r| r.lambda).collect();
            Ok(-interp_cubic(&fam.seeds, &lam, z).0)
        };
        let trace = |x0: f64, dir: f64| -> Result<(f64, f64), SolverError> {
            let steps = 8;
            let h = dir * tau / steps as f64;
            let (mut x, mut s) = (x0, t);
            for _ in 0..steps {
                let k1 = speed(x, s)?;
                let k2 = speed(x + 0.5 * h * k1, s + 0.5 * h)?;
                let k3 = speed(x + 0.5 * h * k2, s + 0.5 * h)?;
                let k4 = speed(x + h * k3, s + h)?;
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                s += h;
            }
            let p = self.profile_at(f, s)?;
            let y = self.label_in(f, &p, x)?;
            let r: Vec<f64> = p.iter().map(|r| r.rho).collect();
            Ok((y, interp_cubic(&fam.seeds, &r, y).0))
        };
        let (zlo, zhi) = (fam.seeds[0], fam.seeds[fam.seeds.len() - 1]);
        let mut points = Vec::new();
        for (k, rec) in prof.iter().enumerate() {
            if !fam.in_support[k] || dz[k].abs() < 0.1 * sup {
                continue;
            }
            let (Ok((yp, rp)), Ok((ym, rm))) = (trace(rec.x, 1.0), trace(rec.x, -1.0)) else {
                continue;
            };
            if yp <= zlo || ym >= zhi {
                continue;
            }
            let dy = (rp - rm) / (yp - ym);
            let transport = rec.rho / (2.0 * rec.lambda) * rec.drho;
            let rel = (dz[k] - dy - transport).abs() / dz[k].abs();
            points.push(RhodPoint { z: fam.seeds[k], dz: dz[k], dy, transport, rel_error: rel });
        }
        let max_rel_error = points.iter().map(|p| p.rel_error).fold(0.0, f64::max);
        Ok(RhodReport { t, tau, sup_dz: sup, points, max_rel_error })
    }
}
