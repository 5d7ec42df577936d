//! Reference solutions used to cross-check the characteristic solver: a
//! first-order finite-volume solver on the full system, and the scalar
//! single-wave model whose slope along a characteristic has a closed form.

mod charnet;
mod error;
mod fv;
mod riccati;
mod single_wave;

pub use charnet::{char_net_path, CharPath};
pub use error::OracleError;
pub use fv::{fv_solve, FvConfig, FvField};
pub use riccati::{
    i_closed_form, i_of_w2, riccati_blowup_time, riccati_ode, riccati_slope, RiccatiSlope, W2Path,
};
pub use single_wave::{
    dlambda2_dw1, dlambda2_dw2, lambda2, single_wave_inverse, single_wave_invariants, trace_characteristic,
    SimpleWave, SingleWaveState,
};
