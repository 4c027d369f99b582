//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes, grouped by who is at fault.
///
/// `Config` and `Domain` mean the caller handed us something unusable
/// (mismatched shapes, nonpositive temperature, ...). The remaining
/// variants mean a computation went bad at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Inconsistent or out-of-range configuration: bad sizes, mismatched
    /// grids, empty ensembles, unknown names.
    Config(String),
    /// Field value outside its physical domain (temperature or speed that
    /// must be positive, and so on).
    Domain(String),
    /// Runtime numerical failure: non-finite values, division guards,
    /// degenerate fits.
    Numerical(String),
    /// Iteration hit its step cap before the residual dropped below
    /// tolerance.
    NonConvergence { steps: u64, residual: f64 },
    /// A walker exceeded the per-particle step cap; the profile's dt is too
    /// small for the requested horizon.
    RunawayProfile { cap: u64 },
    /// The request is well-formed but outside what this implementation
    /// admits.
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::NonConvergence { steps, residual } => write!(
                f,
                "no steady state after {steps} steps (residual {residual:.3e})"
            ),
            Error::RunawayProfile { cap } => {
                write!(f, "particle exceeded step cap {cap}; profile dt too small for horizon")
            }
            Error::Unsupported(msg) => write!(f, "unsupported case: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    /// True when the error reflects bad input rather than a runtime
    /// numerical failure. The CLI maps this to its exit-code split.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain(_) | Error::Unsupported(_))
    }
}
