use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("protocol has no segments of positive duration")]
    EmptyProtocol,

    #[error("coupling strength is zero, the ratio gamma/omega is undefined")]
    UndefinedRatio,

    #[error("omega_t0 = {0} is outside (0, pi): no finite exceptional point")]
    OutOfDomain(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("initial state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative",
        });
    }
    Ok(value)
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    check_non_negative(name, value)?;
    if value == 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        });
    }
    Ok(value)
}
