use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("non-finite value in the finite-volume field at t = {t}")]
    NotFinite { t: f64 },
    #[error("CFL number {cfl} exceeds {limit} at t = {t}")]
    Cfl { cfl: f64, limit: f64, t: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("vacuum state: {0} must be positive")]
    Vacuum(f64),
    #[error("denominator {denominator} <= 0 at t = {t}: past blow-up")]
    PastBlowup { t: f64, denominator: f64 },
    #[error("characteristic net does not reach t = {0}")]
    NetTooShort(f64),
}
