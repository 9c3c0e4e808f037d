//! Numerical building blocks shared by the rest of the workspace.
//!
//! * [`C2Matrix`]: fixed-size complex 2x2 matrices with the named constants
//!   `I`, `J`, `Δ+`, `Δ-`.
//! * [`BranchedLog`]: a logarithm whose imaginary part is carried explicitly, so
//!   powers such as `x^σ` stay on a chosen sheet of the universal cover.
//! * [`gamma`], [`ln_gamma`], [`rgamma`], [`digamma`]: complex special functions.

mod branch;
mod error;
mod gamma;
mod matrix;

pub use branch::{branched_power, BranchedLog};
pub use error::SpecialError;
pub use gamma::{digamma, gamma, ln_gamma, rgamma, sin_pi, EULER_GAMMA};
pub use matrix::{eigvals2, mat_inv, mat_mul, C2Matrix};

pub use num_complex::Complex64;

/// Shorthand constructor for a complex number.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The imaginary unit.
pub const I: Complex64 = c64(0.0, 1.0);
