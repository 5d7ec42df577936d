//! Coefficients of the characteristic wave decomposition: cᵢₘ = ∇λᵢ·r_m and
//! the interaction terms γ built from directional derivatives of the right
//! eigenvectors. `structure_report` samples the amplitude ball and checks
//! the cancellation identities.

mod report;
mod table;

pub use report::{structure_report, structure_report_seeded, validate_sign_convention, IdentityCheck, SignMargin, StructureReport};
pub use table::{
    analytic_transverse_products, coupling_table, coupling_table_with, directional_derivatives,
    grad_eigenvector, grad_eigenvector_analytic, table6, CouplingError, CouplingTable, Table6, FD_RELATIVE_STEP,
};
