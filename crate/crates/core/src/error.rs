use alloc::string::String;
use core::fmt;

use crate::geometry::Dim;

/// Errors raised by the measure, kernel, convolution, and diagnostic layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A ball query with a non-finite center or a negative/non-finite radius.
    InvalidQuery(String),
    /// An out-of-range argument (scale `t <= 0`, level outside `(0, phi(0))`, ...).
    InvalidParameter(String),
    /// The kernel does not satisfy a hypothesis the operation needs.
    InvalidKernel(String),
    /// Components, points, or kernels of different dimensions were mixed.
    DimensionMismatch { expected: Dim, found: Dim },
    /// Adaptive quadrature hit its subdivision cap before reaching tolerance.
    Accuracy { estimate: f64, bound: f64 },
    /// `s^n phi(s)` does not decay on the probe grid, so `phi` is not integrable.
    DivergentTail { radius: f64, value: f64 },
    /// The convolution integrand is not integrable at the requested point.
    Divergent(String),
    /// Detector verdicts contradict an implication that must hold.
    Inconsistency(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidQuery(msg) => write!(f, "invalid query: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidKernel(msg) => write!(f, "invalid kernel: {msg}"),
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected n = {}, found n = {}",
                expected.n(),
                found.n()
            ),
            Error::Accuracy { estimate, bound } => write!(
                f,
                "quadrature did not converge: best estimate {estimate:e} with error bound {bound:e}"
            ),
            Error::DivergentTail { radius, value } => write!(
                f,
                "kernel tail does not decay: s^n phi(s) = {value:e} at s = {radius:e}"
            ),
            Error::Divergent(msg) => write!(f, "divergent integral: {msg}"),
            Error::Inconsistency(msg) => write!(f, "detector inconsistency: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
