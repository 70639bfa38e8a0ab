use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every evaluation path.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain on which the formulas hold.
    #[error("domain error ({param}): {detail}")]
    Domain { param: &'static str, detail: String },

    /// A caller broke an internal contract (e.g. a cdf value outside [0, 1]).
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("quadrature did not converge after {subdivisions} panels (estimated error {estimate:e}){hint}")]
    QuadratureFailure {
        subdivisions: usize,
        estimate: f64,
        hint: String,
    },

    /// The threshold equation has no root inside the search bracket.
    #[error("threshold outside bracket: {0}")]
    Bracket(String),

    #[error(
        "|x| = {x} is below the certified pdf range: bound {bound:e} exceeds epsilon {epsilon:e}"
    )]
    OutOfValidatedRange { x: f64, bound: f64, epsilon: f64 },

    #[error("oracle accuracy: {0}")]
    OracleAccuracy(String),

    /// Malformed request parameters (grids, term lists, policies).
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Domain,
    Numerical,
    Usage,
}

impl Error {
    pub(crate) fn domain(param: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            param,
            detail: detail.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain { .. } | Error::Contract(_) => ErrorClass::Domain,
            Error::InvalidRequest(_) => ErrorClass::Usage,
            Error::QuadratureFailure { .. }
            | Error::Bracket(_)
            | Error::OutOfValidatedRange { .. }
            | Error::OracleAccuracy(_) => ErrorClass::Numerical,
        }
    }
}
