//! Algebraic model of the planar reductions of the quasilinear elastic wave
//! system: material constants, the first-order coefficient matrix and its
//! exact eigenstructure in the 3D (n = 6) and 2D (n = 4) settings.
//!
//! Every eigen-quantity comes from closed radical forms. No numerical
//! eigensolver is involved, so the repeated eigenvalues on the slice
//! φ₂ = φ₃ = 0 are handled exactly.

mod error;
mod params;
mod sampling;
mod spectrum;

pub use error::ModelError;
pub use params::{sigma_from_gamma, DimMode, MaterialParams, StoredEnergyCoeffs};
pub use sampling::sample_ball;
pub use spectrum::{
    apply_a, aux_scalars, coefficient_matrix, embed, frame6, grad_lambda, grad_lambda6,
    lambda_max, norm, spectrum, spectrum_with, AuxScalars, Frame6, Normalization, Spectrum, Vec6,
    DEGENERATE_TRANSVERSE, FAMILIES_2D, SLOTS_2D,
};
