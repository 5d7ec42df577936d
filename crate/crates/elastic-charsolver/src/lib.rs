//! Evolution of the planar system up to the first shock: an Eulerian field
//! for Φ plus, for each family, characteristic nodes carrying (X, ρ, w, v).

mod config;
mod diagnostics;
mod error;
mod eulerian;
mod geometry;
mod history;
mod nodes;
mod run;

pub use config::{RunOptions, SolverConfig};
pub use diagnostics::{blowup_indicator, dz_rho1, linear_fit, rho_envelopes, shock_bracket, LinearFit};
pub use error::SolverError;
pub use eulerian::EulerGrid;
pub use geometry::{omega_region, section_weight_2d, separation_time, strip_gap, strip_groups, OmegaRegion};
pub use history::{
    interp_cubic, lagrange4, BicharPoint, FamilyHistory, History, NodeRec, RhodPoint, RhodReport,
};
pub use nodes::{freeze, node_rhs, Frozen, NodeEval, NodeVars};
pub use run::{
    initial_phi, simulate, FieldSnapshot, RunChecks, RunResult, SeriesRow, ShockReport, StopReason, ENVELOPE_SLACK,
};
