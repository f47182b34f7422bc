use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A cube, grid or function does not live where the operation expects it.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scalar parameter is outside its admissible range.
    #[error("parameter error: {name} = {value} ({reason})")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Bisection, series or quadrature failed to converge or overflowed.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A weight vanishes where a dual average or quotient needs it positive.
    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),

    #[error("kernel error: {0}")]
    Kernel(String),

    /// The requested scale cannot be represented on the grid.
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status: 2 for usage and configuration problems, 3 for
    /// numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter { .. }
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Kernel(_)
            | Error::DegenerateInput(_) => 2,
            Error::Domain(_)
            | Error::Numeric(_)
            | Error::DegenerateWeight(_)
            | Error::Resolution(_) => 3,
        }
    }

    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Parameter {
            name,
            value,
            reason,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
