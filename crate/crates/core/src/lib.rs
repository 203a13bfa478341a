//! Resonances, scattering and phase portraits for quantum graphs with a compact
//! core: an interval, a flat disc or a ball joined at one point to a bundle of
//! half-line leads through a unitary coupling.

pub mod abflux;
pub mod cli;
pub mod contour;
pub mod cplx;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod resonance;
pub mod scattering;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for the imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
