use core::fmt;

use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// A caller broke a documented precondition (ordering, bracketing, sizes).
    Contract(&'static str),
    /// Adaptive refinement ran out of budget before reaching the tolerance.
    /// Carries the best estimate obtained so far.
    NotConverged {
        value: Complex64,
        abs_err: f64,
        evaluations: usize,
    },
    /// A pole of a principal-value integrand is not simple enough to resolve.
    Degenerate { root: f64, slope: f64 },
    /// A bracket search ran past its upper limit without a sign change.
    UnboundedRange { limit: f64 },
    /// The concurrence already vanishes at the start of an `L_max` search.
    NoHarvesting,
}

impl Error {
    /// True for errors that signal lost accuracy rather than bad input.
    pub fn is_accuracy(&self) -> bool {
        matches!(self, Error::NotConverged { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::Contract(what) => write!(f, "contract violation: {what}"),
            Error::NotConverged {
                value,
                abs_err,
                evaluations,
            } => write!(
                f,
                "quadrature did not converge after {evaluations} evaluations \
                 (best estimate {value}, error estimate {abs_err:e})"
            ),
            Error::Degenerate { root, slope } => write!(
                f,
                "degenerate pole at {root}: |u'| = {slope:e} is below 1e-10"
            ),
            Error::UnboundedRange { limit } => {
                write!(f, "no sign change found below L = {limit}")
            }
            Error::NoHarvesting => {
                write!(f, "no entanglement is harvested at the initial separation")
            }
        }
    }
}

impl core::error::Error for Error {}
