use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("Gamma-type function evaluated at the pole z = {0}")]
    Pole(Complex64),
    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
}
