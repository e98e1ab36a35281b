//! Numerical boundary behaviour of convolution integrals on the upper
//! half-space.
//!
//! The crate works with locally finite signed or complex measures on
//! `R` and `R^2` (densities, atoms, and singular distribution functions),
//! radial radially-decreasing kernels and their dilations `phi_t`, and the
//! convolution integrals `phi[mu](x, t) = (mu * phi_t)(x)`. On top of those
//! it provides scale-by-scale detectors for the pointwise regularity
//! notions that govern boundary limits (symmetric derivative, Lebesgue
//! point, sigma-point, strong derivative) and probes that follow cones,
//! rays, and parabolic regions toward a boundary point.
//!
//! Everything here is `no_std` + `alloc`, deterministic, and free of
//! shared mutable state. File formats, the batch API, and the command-line
//! front end live in the `ntlim-cli` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cantor;
pub mod convolution;
pub mod diagnostics;
mod error;
pub mod geometry;
pub mod kernel;
pub mod measure;
pub mod probe;
pub mod quadrature;
pub mod tail;

pub use error::Error;
pub use geometry::{Dim, Point};
pub use num_complex::Complex64;
pub use quadrature::{Estimate, Tolerance};

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
