//! Complex Gamma, reciprocal Gamma and digamma.
//!
//! `ln Γ` uses an 11-term Lanczos sum (r = 10.900511, Pugh's coefficient set)
//! on `Re z >= 1/2` and the reflection formula elsewhere. The reciprocal Gamma
//! function is computed directly so it is finite (and exactly zero) at the
//! non-positive integers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::SpecialError;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

const LANCZOS_R: f64 = 10.900511;
const LANCZOS_D: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
// ln(2·sqrt(e/π))
const LN_TWO_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;
const POLE_DIST: f64 = 1e-14;

fn is_pole(z: Complex64) -> bool {
    z.re < 0.5 && (z - z.re.round()).norm() < POLE_DIST
}

/// `(sin πx, cos πx)` with argument reduction so integers give exact zeros.
fn sin_cos_pi_real(x: f64) -> (f64, f64) {
    let n = x.round();
    let r = x - n;
    let (s, c) = (PI * r).sin_cos();
    if (n as i64).rem_euclid(2) == 1 {
        (-s, -c)
    } else {
        (s, c)
    }
}

/// `sin(πz)`, exact zero at the integers.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let (s, c) = sin_cos_pi_real(z.re);
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}

fn cos_pi(z: Complex64) -> Complex64 {
    let (s, c) = sin_cos_pi_real(z.re);
    let y = PI * z.im;
    Complex64::new(c * y.cosh(), -s * y.sinh())
}

fn cot_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 10.0 {
        return cos_pi(z) / sin_pi(z);
    }
    // cot(πz) = i(w+1)/(w-1) with w = e^{2πiz}; pick the decaying exponential.
    let (s, c) = sin_cos_pi_real(2.0 * z.re);
    if z.im > 0.0 {
        let w = Complex64::new(c, s) * (-2.0 * PI * z.im).exp();
        Complex64::i() * (w + 1.0) / (w - 1.0)
    } else {
        let w = Complex64::new(c, -s) * (2.0 * PI * z.im).exp();
        -Complex64::i() * (w + 1.0) / (w - 1.0)
    }
}

/// A logarithm of `sin(πz)` that stays finite for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return sin_pi(z).ln();
    }
    // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz}) for Im z > 0, conjugate otherwise.
    let half_i = Complex64::new(0.0, 0.5).ln();
    if z.im > 0.0 {
        let w = (Complex64::new(0.0, 2.0 * PI) * z).exp();
        half_i - Complex64::new(0.0, PI) * z + (1.0 - w).ln()
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let mut s = Complex64::new(LANCZOS_D[0], 0.0);
    for (k, d) in LANCZOS_D.iter().enumerate().skip(1) {
        s += *d / (z + (k as f64 - 1.0));
    }
    let t = z - 0.5;
    s.ln() + LN_TWO_SQRT_E_OVER_PI + t * ((t + LANCZOS_R).ln() - 1.0)
}

/// A logarithm of `Γ(z)`.
///
/// The imaginary part is some determination of `arg Γ(z)`, not necessarily
/// the one continuous from the positive real axis.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, SpecialError> {
    if is_pole(z) {
        return Err(SpecialError::Pole(z));
    }
    if z.re >= 0.5 {
        Ok(lanczos_ln_gamma(z))
    } else {
        Ok(PI.ln() - ln_sin_pi(z) - lanczos_ln_gamma(1.0 - z))
    }
}

pub fn gamma(z: Complex64) -> Result<Complex64, SpecialError> {
    if is_pole(z) {
        return Err(SpecialError::Pole(z));
    }
    if z.re >= 0.5 {
        Ok(lanczos_ln_gamma(z).exp())
    } else if z.im.abs() < 20.0 {
        Ok(PI / (sin_pi(z) * lanczos_ln_gamma(1.0 - z).exp()))
    } else {
        ln_gamma(z).map(Complex64::exp)
    }
}

/// `1/Γ(z)`, an entire function; exactly zero at `0, -1, -2, …`.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        (-lanczos_ln_gamma(z)).exp()
    } else if z.im.abs() < 20.0 {
        sin_pi(z) * lanczos_ln_gamma(1.0 - z).exp() / PI
    } else {
        (ln_sin_pi(z) + lanczos_ln_gamma(1.0 - z) - PI.ln()).exp()
    }
}

// B_{2k} / (2k) for k = 1..8.
const DIGAMMA_ASYMPTOTIC: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// The digamma function `ψ = Γ'/Γ`.
pub fn digamma(z: Complex64) -> Result<Complex64, SpecialError> {
    if is_pole(z) {
        return Err(SpecialError::Pole(z));
    }
    if z.re < 0.5 {
        return Ok(digamma(1.0 - z)? - PI * cot_pi(z));
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let w = (z * z).inv();
    let mut series = Complex64::new(0.0, 0.0);
    for c in DIGAMMA_ASYMPTOTIC.iter().rev() {
        series = (series + *c) * w;
    }
    Ok(acc + z.ln() - 0.5 / z - series)
}
