use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("perturbative regime violated: {0}")]
    NonPerturbative(String),

    #[error("quadrature budget exhausted: estimate {estimate:e} with error {error:e}")]
    QuadratureBudget { estimate: f64, error: f64 },

    #[error("image series did not converge after {terms} terms (estimate {estimate:e})")]
    SeriesNotConverged { estimate: f64, terms: usize },

    #[error("no critical temperature: vacuum negativity vanishes")]
    NoCriticalTemperature,

    #[error("ground state is degenerate (gap {gap:e})")]
    DegenerateGround { gap: f64 },

    #[error("truncated Hilbert space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("norm drift {drift:e} at t = {time}")]
    NormDrift { drift: f64, time: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
