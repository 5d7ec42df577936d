use elastic_coupling::table6;
use elastic_model::{frame6, grad_lambda6, MaterialParams, Normalization, Vec6};
use serde::{Deserialize, Serialize};

use crate::eulerian::EulerGrid;

/// (X, ρ, w, v) carried along one characteristic.
pub type NodeVars = [f64; 4];

/// Coefficients frozen at handoff for a family that has left the narrow
/// window: dX = λ, dw = −c w², dρ = c v, dv = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frozen {
    pub lambda: f64,
    pub c_ii: f64,
    pub phi: Vec6,
}

#[derive(Debug, Clone, Copy)]
pub struct NodeEval {
    pub dy: NodeVars,
    pub lambda: f64,
    pub phi: Vec6,
    pub dir: [f64; 2],
}

/// Time derivative of the node variables of family `fam` (embedded index).
/// Off-family amplitudes wᵐ = lᵐ·∂ₓΦ come from the Eulerian field; the
/// node's own wave is its carried value. Outside the window the field is
/// constant (edge value) and every off-family wave vanishes.
pub fn node_rhs(
    fam: usize,
    y: &NodeVars,
    dir: [f64; 2],
    frozen: Option<&Frozen>,
    grid: &EulerGrid,
    params: &MaterialParams,
) -> NodeEval {
    let [x, rho, wi, v] = *y;
    if let Some(f) = frozen {
        return NodeEval {
            dy: [f.lambda, f.c_ii * v, -f.c_ii * wi * wi, 0.0],
            lambda: f.lambda,
            phi: f.phi,
            dir,
        };
    }
    let (phi, dphi) = grid.sample(x).unwrap_or((grid.edge_value(x), [0.0; 6]));
    let frame = frame6(&phi, params, Normalization::UnitPolarization, dir);
    let mut w: [f64; 6] = std::array::from_fn(|m| {
        if m == fam {
            0.0
        } else {
            (0..6).map(|a| frame.l[m][a] * dphi[a]).sum()
        }
    });
    w[fam] = wi;
    let coupled = (0..6).any(|m| m != fam && w[m] != 0.0);
    let i = fam;
    let lambda = frame.lambda[i];
    let dy = if !coupled {
        let g = grad_lambda6(&phi, params)[i];
        let cii: f64 = (0..6).map(|a| g[a] * frame.r[i][a]).sum();
        [lambda, cii * v, -cii * wi * wi, 0.0]
    } else {
        let active: [bool; 6] = std::array::from_fn(|m| w[m] != 0.0);
        let t = table6(&phi, params, Normalization::UnitPolarization, dir, active);
        let (c, g) = (&t.c[i], &t.gamma[i]);
        let mut a_lin = 0.0;
        let mut c_sum = 0.0;
        let mut g_lin = 0.0;
        let mut b = 0.0;
        for m in 0..6 {
            if m == i || w[m] == 0.0 {
                continue;
            }
            a_lin += (-c[m] + g[i][m]) * w[m];
            c_sum += c[m] * w[m];
            g_lin += g[i][m] * w[m];
            for k in 0..6 {
                if k != m && k != i && w[k] != 0.0 {
                    b += g[k][m] * w[k] * w[m];
                }
            }
        }
        let cii = c[i];
        [
            lambda,
            cii * v + c_sum * rho,
            -cii * wi * wi + a_lin * wi + b,
            g_lin * v + b * rho,
        ]
    };
    NodeEval { dy, lambda, phi, dir: frame.dir }
}

/// Frozen coefficients at the node's current state.
pub fn freeze(fam: usize, x: f64, dir: [f64; 2], grid: &EulerGrid, params: &MaterialParams) -> Frozen {
    let phi = grid.sample(x).map(|s| s.0).unwrap_or(grid.edge_value(x));
    let frame = frame6(&phi, params, Normalization::UnitPolarization, dir);
    let g = grad_lambda6(&phi, params)[fam];
    let c_ii = (0..6).map(|a| g[a] * frame.r[fam][a]).sum();
    Frozen { lambda: frame.lambda[fam], c_ii, phi }
}
