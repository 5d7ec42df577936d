use elastic_initdata::InitDataError;
use elastic_model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    InitData(#[from] InitDataError),
    #[error("invalid solver config: {0}")]
    Config(String),
    #[error("state left the amplitude ball at t = {t}, x = {x}: |phi| = {amplitude:e} > {limit:e}")]
    AmplitudeExit { t: f64, x: f64, amplitude: f64, limit: f64 },
    #[error("non-finite value in {what} at t = {t}")]
    NotFinite { what: String, t: f64 },
    #[error("CFL number {cfl} exceeds the stability limit {limit} at t = {t}")]
    Cfl { cfl: f64, limit: f64, t: f64 },
    #[error("strip speeds overlap on the amplitude ball (gap {0}); reduce delta")]
    NoSeparation(f64),
    #[error("families must differ (got {0} twice)")]
    SameFamily(usize),
    #[error("characteristics of families {i} and {j} do not meet within the stored history")]
    NoCrossing { i: usize, j: usize },
    #[error("query outside the stored history: {0}")]
    OutOfRange(String),
}
