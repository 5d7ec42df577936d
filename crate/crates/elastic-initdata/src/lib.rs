//! Initial data for the shock-formation runs: the mollified |ln z|^α
//! profile carried by the fastest family, smooth bumps for the others,
//! reconstruction of Φ(·, 0) from the wave amplitudes, and quadrature
//! estimates of the Ḣ¹ / Ḣ^½ norms of the profile.

mod error;
mod family;
pub mod quad;
mod profile;
mod reconstruct;
mod sobolev;

pub use error::InitDataError;
pub use family::{build_initial_family, constraint_bounds, InitialDataSpec, InitialFamilies};
pub use profile::{lindblad_profile, mollifier, Profile, MOLLIFIER_MASS};
pub use reconstruct::{reconstruct_phi0, Reconstruction};
pub use sobolev::{
    sobolev_h1_estimate, sobolev_hhalf_estimate, H1Estimate, HHalfEstimate, HHalfOptions,
};
