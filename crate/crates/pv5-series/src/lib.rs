//! Series solutions `(A0(x), Ax(x))` of the Schlesinger system for the linear
//! problem
//!
//! ```text
//! dY/dλ = (A0/λ + Ax/(λ - x) + J/2) Y
//! ```
//!
//! near `x = i∞`, parametrised by `(c0, cx, σ)` for fixed formal monodromy
//! exponents `(θ0, θx, θ∞)`.
//!
//! Both residues are kept in the traceless form `f0 J + f+ Δ+ + f- Δ-`, and
//! `g0 = -θ∞/2 - f0` holds exactly for every evaluation.

mod domain;
mod params;
mod series;

pub use domain::{domain_check, domain_check_with, DomainConfig};
pub use params::{gamma_quad, leading_lambda_matrices, GammaQuad, Parameters};
pub use series::{
    schlesinger_residual, series_a_pair, series_a_pair_degenerate, series_a_pair_unchecked, ABPair,
    DegenerateKind, ResidualForm, Truncation,
};

use pv5_special::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("integration constant {0} must be nonzero")]
    ZeroConstant(&'static str),
    #[error("x = {x} lies outside the admissible sector-like domain")]
    OutsideDomain { x: Complex64 },
    #[error("degenerate parameters: {0}")]
    Degenerate(&'static str),
}
