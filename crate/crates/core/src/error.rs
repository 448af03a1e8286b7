use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state became non-finite at t = {t} (last finite x = {x}); reduce dt0")]
    NonFiniteState { t: f64, x: f64 },

    #[error("quadrature did not converge: partial estimate {partial:e} with error {error:e}")]
    Quadrature { partial: f64, error: f64 },

    #[error("{0}")]
    Overflow(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("argument {x} outside validated range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
