//! Numerical Hermite-spectral toolkit for Gelfand-Shilov spaces.
//!
//! * [`weights`]: weight sequences, their conditions, the associated function.
//! * [`hermite`]: Hermite functions, Gauss-Hermite quadrature, coefficient
//!   fields, analysis/synthesis and ladder operators.
//! * [`spaces`]: weighted norms, membership diagnostics, the dual pairing and
//!   seminorm estimates.
//! * [`structural`]: regularization of dual coefficients into a bounded
//!   continuous function and the oscillator-power reconstruction.
//! * [`kernel`]: kernel coefficient matrices and the operators they induce.

pub mod error;
pub mod hermite;
pub mod io;
pub mod kernel;
pub mod spaces;
pub mod structural;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
