use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid material parameters: {0}")]
    InvalidParams(String),
    #[error("state has {got} components, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("state amplitude {amplitude:.3e} exceeds the admissible ball radius {limit:.3e}")]
    Amplitude { amplitude: f64, limit: f64 },
}
