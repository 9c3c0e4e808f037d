use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// A logarithm `ln|z| + i·arg` with the argument fixed on a definite sheet.
///
/// The argument is never reduced to the principal interval. Constructing a
/// log relative to a reference argument picks the determination closest to
/// it, which is how continuity is kept while walking along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedLog {
    pub value: Complex64,
    pub tracked_arg: f64,
}

impl BranchedLog {
    /// Log of `z` whose argument is the determination nearest to `arg_hint`.
    pub fn near(z: Complex64, arg_hint: f64) -> Self {
        let principal = z.arg();
        let k = ((arg_hint - principal) / TAU).round();
        Self::with_arg(z.norm(), principal + k * TAU)
    }

    /// Log of the point `modulus·e^{i·arg}` with the given argument.
    pub fn with_arg(modulus: f64, arg: f64) -> Self {
        Self {
            value: Complex64::new(modulus.ln(), arg),
            tracked_arg: arg,
        }
    }

    /// The sheet used throughout for points near the positive imaginary
    /// axis: the argument closest to π/2.
    pub fn upper(z: Complex64) -> Self {
        Self::near(z, PI / 2.0)
    }

    /// Continue to a nearby point, keeping the argument continuous.
    pub fn continue_to(&self, z: Complex64) -> Self {
        Self::near(z, self.tracked_arg)
    }

    pub fn point(&self) -> Complex64 {
        self.value.exp()
    }

    pub fn modulus(&self) -> f64 {
        self.value.re.exp()
    }

    pub fn pow(&self, exponent: Complex64) -> Complex64 {
        branched_power(self, exponent)
    }
}

/// `exp(exponent · (ln|λ| + i·tracked_arg))`.
pub fn branched_power(base: &BranchedLog, exponent: Complex64) -> Complex64 {
    (exponent * Complex64::new(base.value.re, base.tracked_arg)).exp()
}
