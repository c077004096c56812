use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module.
///
/// [`Error::is_numerical`] splits them into input problems and numerical
/// breakdowns, which the command line maps to distinct exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// A density was requested from a measure-valued datum.
    Measure,
    /// An integral or supremum diverges.
    Divergent(String),
    /// A quadrature did not reach its tolerance.
    Quadrature { what: &'static str, value: f64, error: f64 },
    /// A kernel table failed a structural check.
    Kernel(String),
    /// The envelope or moment is evaluated past its pole.
    Pole { t: f64, pole: f64 },
    /// A maximizer sits on the boundary of the searched range.
    Range(String),
    /// The grid cannot resolve the solution.
    Resolution(String),
    /// Internal consistency check failed.
    Inconsistent(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Domain(_) | Error::Measure)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "{m}"),
            Error::Measure => write!(f, "datum is a measure and has no pointwise density"),
            Error::Divergent(m) => write!(f, "divergent: {m}"),
            Error::Quadrature { what, value, error } => {
                write!(f, "quadrature for {what} did not converge (value {value:e}, error estimate {error:e})")
            }
            Error::Kernel(m) => write!(f, "kernel table rejected: {m}"),
            Error::Pole { t, pole } => write!(f, "time {t} is at or beyond the pole {pole}"),
            Error::Range(m) => write!(f, "search range too small: {m}"),
            Error::Resolution(m) => write!(f, "insufficient resolution: {m}"),
            Error::Inconsistent(m) => write!(f, "internal inconsistency: {m}"),
        }
    }
}

impl core::error::Error for Error {}
