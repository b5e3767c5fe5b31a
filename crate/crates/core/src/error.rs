use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes of the numerical routines.
///
/// Numerical payloads are carried as `f64` regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid Lévy measure: {0}")]
    InvalidMeasure(String),
    #[error(
        "quadrature did not converge on [{lower:e}, {upper:e}]: partial value {partial:e}, \
         error estimate {error:e}"
    )]
    QuadratureNotConverged {
        lower: f64,
        upper: f64,
        partial: f64,
        error: f64,
    },
    #[error("divergent integral in region {region}")]
    DivergentIntegral { region: String },
    #[error("{what} did not converge within {max_terms} terms")]
    SeriesNotConverged { what: &'static str, max_terms: usize },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("tail not log-regular: {0}")]
    TailNotLogRegular(String),
    #[error("density unavailable for the {family} family; use Monte Carlo sampling")]
    DensityUnavailable { family: String },
    #[error("sampling unavailable for the {family} family")]
    SamplerUnavailable { family: String },
    #[error("atom truncation needs {required} terms but the cap is {cap}")]
    TruncationCap { required: usize, cap: usize },
    #[error("CDF tabulation failed: {0}")]
    Tabulation(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
