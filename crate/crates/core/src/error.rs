use thiserror::Error;

/// Errors produced by the engine library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} s is outside the schedule interval [0, {tau}] s")]
    OutOfRange { t: f64, tau: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("step doubling did not reach tolerance {tol:e} before the cap of {cap} steps")]
    NonConvergence { tol: f64, cap: usize },

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite, got {value}"
        )))
    }
}
