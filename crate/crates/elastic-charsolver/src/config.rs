use serde::{Deserialize, Serialize};

use crate::error::SolverError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Eulerian cells per η (dx = η / cells_per_eta).
    pub cells_per_eta: f64,
    /// Eulerian step as a fraction of dx/λ₁(0).
    pub dt_cfl: f64,
    /// Uniform seeds on [η, 2η] for the first family (sentinels are extra).
    pub nodes_family1: usize,
    /// Uniform seeds on [η, 2η] for the other families.
    pub nodes_other: usize,
    /// Shock threshold on min ρ₁.
    pub rho_stop: f64,
    pub epsilon: f64,
    /// Run cap in units of 1/(|c₁₁(0)|·W₀).
    pub t_max_factor: f64,
    /// Macro steps per 1/(|c₁₁(0)|·W₀) away from the shock.
    pub macro_steps: f64,
    /// Macro step limit as a fraction of the ρ₁ collapse time ρ₁/|∂ₜρ₁|.
    pub kappa: f64,
    /// Handoff to the narrow window at this multiple of t₀.
    pub handoff_factor: f64,
    /// Narrow-window length in units of η.
    pub window_eta: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cells_per_eta: 400.0,
            dt_cfl: 0.45,
            nodes_family1: 161,
            nodes_other: 41,
            rho_stop: 1e-3,
            epsilon: 0.01,
            t_max_factor: 1.5,
            macro_steps: 400.0,
            kappa: 0.0125,
            handoff_factor: 2.0,
            window_eta: 1.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::Config(m.into()));
        if !(self.cells_per_eta >= 20.0 && self.cells_per_eta.is_finite()) {
            return bad("cells_per_eta must be >= 20");
        }
        if !(self.dt_cfl > 0.0 && self.dt_cfl <= 0.5) {
            return bad("dt_cfl must lie in (0, 0.5]");
        }
        if self.nodes_family1 < 5 || self.nodes_other < 3 {
            return bad("need at least 5 first-family and 3 other seeds");
        }
        if !(self.rho_stop > 0.0 && self.rho_stop < 0.1) {
            return bad("rho_stop must lie in (0, 0.1)");
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.01) {
            return bad("epsilon must lie in (0, 0.01]");
        }
        if !(self.t_max_factor > 0.0) || !(self.macro_steps >= 10.0) {
            return bad("t_max_factor must be > 0 and macro_steps >= 10");
        }
        if !(self.kappa > 0.0 && self.kappa <= 0.5) {
            return bad("kappa must lie in (0, 0.5]");
        }
        if !(self.handoff_factor >= 1.0) || !(self.window_eta >= 1.2) {
            return bad("handoff_factor must be >= 1 and window_eta >= 1.2");
        }
        Ok(())
    }
}

/// Extra controls for a single run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Stop at this time instead of at the shock.
    pub stop_at: Option<f64>,
    /// Times at which the Eulerian field is captured (macro steps land on them).
    pub snapshot_times: Vec<f64>,
}
