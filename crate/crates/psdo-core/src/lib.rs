//! Numerical laboratory for 0th-order pseudodifferential operators on the
//! circle: exact Fourier-basis truncations of quantized symbols, essential
//! spectrum prediction from symbol limits, embedded-eigenvalue certification,
//! commutator positivity checks, and two independent functional-calculus
//! routes.

extern crate blas_src;

pub mod banded;
pub mod error;
pub mod presets;
pub mod profile;
pub mod quantize;
pub mod spectral;
pub mod symbol;
pub mod taylor;
pub mod torus;

pub use error::{Error, Result};
