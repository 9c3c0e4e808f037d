use pv5_series::Parameters;
use pv5_special::{BranchedLog, Complex64};

use crate::TranscendentError;

/// The substitution `(θ0 - θx, θ0 + θx, θ∞) -> (1 - θ∞, 1 - θ0 + θx, θ0 + θx - 1)`,
/// integration constants unchanged.
pub fn pi_substitution(p: &Parameters) -> Parameters {
    let (t0, tx, ti) = (p.theta0, p.thetax, p.thetainf);
    Parameters {
        theta0: (2.0 - ti - t0 + tx) / 2.0,
        thetax: (ti - t0 + tx) / 2.0,
        thetainf: t0 + tx - 1.0,
        ..*p
    }
}

/// `Y/(1 + Y)` with `Y = x^{-1}(y - 1)((Ax)11 + θx/2 - ((Ax)11 - θx/2)/y)`, or in
/// expanded form `-2(Ax)11/x + ((Ax)11 + θx/2) y/x + ((Ax)11 - θx/2)/(x y)`.
/// A vanishing coefficient removes its term, so `y = 0` or `y = ∞` is allowed
/// when the matching coefficient is zero.
pub fn backlund_quotient(
    thetax: Complex64,
    x: Complex64,
    y: Complex64,
    ax11: Complex64,
) -> Result<Complex64, TranscendentError> {
    if x.norm() == 0.0 {
        return Err(TranscendentError::DivisionByZero("x"));
    }
    let up = ax11 + thetax / 2.0;
    let down = ax11 - thetax / 2.0;
    let big_y = if y.is_finite() && y.norm() > 0.0 {
        (y - 1.0) * (up - down / y) / x
    } else {
        let term_y = if up.norm() == 0.0 { up } else if y.is_infinite() { return Ok(Complex64::new(1.0, 0.0)) } else { up * y / x };
        let term_inv = if down.norm() == 0.0 || y.is_infinite() {
            Complex64::new(0.0, 0.0)
        } else if y.norm() == 0.0 {
            return Err(TranscendentError::DivisionByZero("y"));
        } else {
            down / (x * y)
        };
        -2.0 * ax11 / x + term_y + term_inv
    };
    if big_y.is_infinite() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let den = 1.0 + big_y;
    if den.norm() == 0.0 {
        return Err(TranscendentError::DivisionByZero("1 + Y"));
    }
    Ok(big_y / den)
}

/// Exponents of the equation solved by `Y/(1 + Y)` when `y` solves it with `p`:
/// `(θ0 - θx, θ0 + θx, θ∞) -> (1 - θ0 + θx, 1 + θ∞, 1 - θ0 - θx)`.
/// Composed with [`pi_substitution`] this returns the original equation, since
/// the equation depends on `θ0 - θx` and `θ∞` only through
/// `(θ0 - θx ± θ∞)^2`, which is symmetric in the two.
pub fn backlund_exponents(p: &Parameters) -> Parameters {
    let (t0, tx, ti) = (p.theta0, p.thetax, p.thetainf);
    Parameters {
        theta0: (2.0 - t0 + tx + ti) / 2.0,
        thetax: (ti + t0 - tx) / 2.0,
        thetainf: 1.0 - t0 - tx,
        ..*p
    }
}

/// A Bäcklund image together with the exponents of the equation it solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacklundImage {
    pub y_hat: Complex64,
    pub params: Parameters,
}

/// Bäcklund image `Y/(1 + Y)` of a point `(x, y, (Ax)11)` of the family with
/// exponents `p`. To obtain the image of the family `p` itself in its own
/// equation, evaluate `y` and `(Ax)11` on the family `pi_substitution(p)`
/// and pass that record here: the attached exponents are then equivalent to `p`.
pub fn backlund_pi(p: &Parameters, x: Complex64, y: Complex64, ax11: Complex64) -> Result<BacklundImage, TranscendentError> {
    Ok(BacklundImage { y_hat: backlund_quotient(p.thetax, x, y, ax11)?, params: backlund_exponents(p) })
}

/// Printed leading part of the image of the family `p` (evaluated on the
/// `π`-substituted family):
/// `-((σ + 2θ0 - θ∞ - 1)/4) c e^x x^{σ-1} - ((σ + 2θx + θ∞ - 1)/4) c^{-1} e^{-x} x^{-σ-1}`.
/// The `O(x^{-1})` constant and the higher powers are not included.
pub fn backlund_leading(p: &Parameters, x: Complex64) -> Complex64 {
    let lx = BranchedLog::upper(x);
    let c = p.c();
    let e = x.exp() * lx.pow(p.sigma - 1.0);
    let f = (-x).exp() * lx.pow(-p.sigma - 1.0);
    -(p.sigma + 2.0 * p.theta0 - p.thetainf - 1.0) / 4.0 * c * e - (p.sigma + 2.0 * p.thetax + p.thetainf - 1.0) / 4.0 / c * f
}

#[cfg(test)]
mod tests {
    use super::*;
    use pv5_special::c64;

    fn p() -> Parameters {
        Parameters::real(0.21, 0.16, 0.11, c64(0.24, 0.05), c64(1.0, 0.0), c64(0.7, 0.2))
    }

    #[test]
    fn unit_y_maps_to_zero() {
        let r = backlund_pi(&p(), c64(0.0, 30.0), c64(1.0, 0.0), c64(0.3, -0.1)).unwrap();
        assert_eq!(r.y_hat, c64(0.0, 0.0));
    }

    #[test]
    fn vanishing_coefficients_allow_zero_and_infinite_y() {
        let tx = c64(0.16, 0.0);
        let x = c64(0.0, 30.0);
        let a = backlund_quotient(tx, x, c64(0.0, 0.0), tx / 2.0).unwrap();
        // Y = -θx/x + θx·0/x = -θx/x
        let y = -tx / x;
        assert!((a - y / (1.0 + y)).norm() < 1e-16);
        let b = backlund_quotient(tx, x, c64(f64::INFINITY, 0.0), -tx / 2.0).unwrap();
        let y = tx / x;
        assert!((b - y / (1.0 + y)).norm() < 1e-16);
        assert!(backlund_quotient(tx, x, c64(0.0, 0.0), c64(0.3, 0.0)).is_err());
    }

    #[test]
    fn composition_restores_the_equation() {
        let q = p();
        let r = backlund_exponents(&pi_substitution(&q));
        let sq = |a: Complex64| a * a;
        let key = |t: &Parameters| {
            [sq(t.theta0 - t.thetax + t.thetainf), sq(t.theta0 - t.thetax - t.thetainf), t.theta0 + t.thetax]
        };
        for (a, b) in key(&r).iter().zip(key(&q)) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
