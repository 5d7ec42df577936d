use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InitDataError {
    #[error("invalid initial-data spec: {0}")]
    InvalidSpec(String),
    #[error("sign convention c11(0) < 0 violated (c11(0) = {0})")]
    SignConvention(f64),
    #[error("initial data vanish identically (W0 = 0); shock analysis is undefined")]
    ZeroData,
    #[error("family {family} violates {inequality}: sup = {sup:e}, limit = {limit:e}")]
    Constraint {
        family: usize,
        inequality: String,
        sup: f64,
        limit: f64,
    },
    #[error("reconstruction consistency residual {residual:e} exceeds {limit:e}")]
    Consistency { residual: f64, limit: f64 },
    #[error("reconstructed state leaves the amplitude ball at x = {x}: |phi| = {amplitude:e} > {limit:e}")]
    AmplitudeExit { x: f64, amplitude: f64, limit: f64 },
    #[error("bad grid: {0}")]
    Grid(String),
}
