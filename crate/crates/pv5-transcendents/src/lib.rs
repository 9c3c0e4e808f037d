//! The fifth Painlevé transcendent
//!
//! ```text
//! y'' = (1/(2y) + 1/(y-1)) y'^2 - y'/x
//!       + (y-1)^2/(8x^2) ((θ0-θx+θ∞)^2 y - (θ0-θx-θ∞)^2/y)
//!       + (1-θ0-θx) y/x - y(y+1)/(2(y-1))
//! ```
//!
//! recovered from residue pairs `(A0, Ax)` of the isomonodromic flow, together
//! with its leading series near `x = i∞`, the zero and pole lattices along the
//! imaginary axis, and a Bäcklund image.
//!
//! Everything that needs `y` away from the series region goes through
//! [`pv5_flow`]: a series seed high up the imaginary axis is transported to the
//! point of interest.

mod backlund;
mod lattice;
mod point;
mod series;

pub use backlund::{backlund_exponents, backlund_leading, backlund_pi, backlund_quotient, pi_substitution, BacklundImage};
pub use lattice::{
    admissibility, refine_lattice, refine_root, refine_root_with, zero_pole_seeds, zero_pole_seeds_with, Admissibility,
    LatticeFormula, RootKind, RootOptions, RootRefinement, SeedLattice,
};
pub use point::{
    pv_equation_residual, pv_residual, pv_residual_with, transport_to, y_derivative, yzu_from_matrices, PVPoint,
    ResidualOptions, ResidualReport, Stencil,
};
pub use series::{
    fit_series_coefficients, series_coefficients, y_degenerate_series, y_series, DegenerateBranch, SeriesFit,
    YCoefficients,
};

use pv5_flow::FlowError;
use pv5_series::SeriesError;
use pv5_special::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranscendentError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("resonant exponent: {0}")]
    Resonance(&'static str),
    #[error("degenerate family not available: {0}")]
    Degenerate(&'static str),
    #[error("y has a pole or zero denominator at x = {x}")]
    PoleSample { x: Complex64 },
    #[error("finite-difference stencil around {x} meets a pole, zero or unit value of y")]
    StencilHitsPole { x: Complex64 },
    #[error("lattice index range {from}..={to} must start at m >= 1")]
    BadRange { from: i64, to: i64 },
    #[error("Newton refinement from {seed} did not converge in {iterations} iterations (last |f| = {residual:e})")]
    NoConvergence { seed: Complex64, iterations: usize, residual: f64 },
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
}
