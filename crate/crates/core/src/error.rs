use serde::Serialize;
use thiserror::Error;

/// Errors raised by the model, the analytic machinery and the simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("{what} does not exist: {threshold} = {value} (requires {requirement})")]
    Existence {
        what: &'static str,
        threshold: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("adaptive quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("step rejected: {0}")]
    StepSize(String),

    #[error("argument out of domain: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::Domain(_))
    }

    pub fn is_existence_error(&self) -> bool {
        matches!(self, Error::Existence { .. })
    }
}

impl Serialize for Error {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
