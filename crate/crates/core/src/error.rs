use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every evaluation route in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Gamma-type factor was asked to evaluate at one of its poles.
    #[error("pole of {function} at {at}")]
    Pole {
        function: &'static str,
        at: Complex64,
    },

    /// Arguments outside the region where the requested representation is valid.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iterative scheme did not reach its stopping criterion.
    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    /// The integrand produced a NaN or infinity at an interior node.
    #[error("non-finite integrand sample at {at}")]
    NonFinite { at: f64 },

    /// The vertical-line integrand did not decay within the search window.
    #[error("integrand decay not detected up to |tau| = {max_abscissa}")]
    DecayNotDetected { max_abscissa: f64 },

    /// Residue families collide (parameters differ by an integer).
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// Reading or writing a file failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the inputs (as opposed to numerical failure).
    pub fn is_domain_like(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. } | Error::Domain(_) | Error::Degenerate(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
