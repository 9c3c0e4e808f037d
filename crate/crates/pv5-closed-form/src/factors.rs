use std::f64::consts::PI;

use pv5_series::Parameters;
use pv5_special::{c64, digamma, rgamma, C2Matrix, Complex64, EULER_GAMMA};

use crate::ClosedFormError;

/// Which nilpotent generator the local exponent uses at an integer `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaStar {
    /// `θ ∈ {0, 1, 2, ...}`.
    Plus,
    /// `-θ ∈ {1, 2, ...}`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegerCase {
    pub n: i64,
    pub delta: DeltaStar,
}

/// Connection matrices between the local solutions at `0`, `x` and the
/// canonical solutions at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionFactors {
    pub v0: C2Matrix,
    pub vx: C2Matrix,
    pub s_star: C2Matrix,
    pub s_star_star: C2Matrix,
    pub c01: C2Matrix,
    pub c02: C2Matrix,
    pub cx: C2Matrix,
    /// Local monodromy exponent at `0`: `e^{πiθ0 J}`, or `(-1)^n (I + 2πiΔ*)` at integer `θ0`.
    pub e0: C2Matrix,
    pub ex: C2Matrix,
    pub integer_case_0: Option<IntegerCase>,
    pub integer_case_x: Option<IntegerCase>,
    /// Principal square roots used in `c^{-J/2}`.
    pub sqrt_c0: Complex64,
    pub sqrt_cx: Complex64,
}

const INTEGER_TOL: f64 = 1e-12;

pub(crate) fn e_pi_i(a: Complex64) -> Complex64 {
    (c64(0.0, PI) * a).exp()
}

fn two_pi_i() -> Complex64 {
    c64(0.0, 2.0 * PI)
}

pub fn integer_case(theta: Complex64) -> Option<IntegerCase> {
    let n = theta.re.round();
    if theta.im.abs() <= INTEGER_TOL && (theta.re - n).abs() <= INTEGER_TOL {
        let n = n as i64;
        let delta = if n >= 0 { DeltaStar::Plus } else { DeltaStar::Minus };
        Some(IntegerCase { n, delta })
    } else {
        None
    }
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn gamma_pair(theta: Complex64) -> (Complex64, Complex64) {
    // Γ(-θ) and Γ(θ) through the reciprocal gamma, finite off the integers
    (rgamma(-theta).inv(), rgamma(theta).inv())
}

/// `V0` for non-integer `θ`, with `(σ, θ)` as given.
pub fn v_generic(sigma: Complex64, theta: Complex64, thetainf: Complex64) -> C2Matrix {
    let u = (sigma + 2.0 * theta - thetainf) / 4.0;
    let v = (sigma - 2.0 * theta - thetainf) / 4.0;
    let (g_minus, g_plus) = gamma_pair(theta);
    let one = c64(1.0, 0.0);
    C2Matrix::new(
        e_pi_i(v) * g_minus * rgamma(one - u),
        g_minus * rgamma(one + v),
        e_pi_i(u) * g_plus * rgamma(-v),
        -g_plus * rgamma(u),
    )
}

fn psi(z: Complex64) -> Result<Complex64, ClosedFormError> {
    digamma(z).map_err(|_| ClosedFormError::Resonance("digamma argument at a pole"))
}

/// `V̂` for integer `θ = n`.
pub fn v_integer(sigma: Complex64, n: i64, thetainf: Complex64) -> Result<C2Matrix, ClosedFormError> {
    let one = c64(1.0, 0.0);
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let m = n.unsigned_abs();
    let fact = factorial(m);
    // -ψ(1) - ψ(1 + m) with ψ(1) = -γ and ψ(1 + m) = -γ + H_m
    let harmonic: f64 = (1..=m).map(|k| 1.0 / k as f64).sum();
    let psi_tail = c64(2.0 * EULER_GAMMA - harmonic, 0.0);
    let ipi = c64(0.0, PI);
    if n >= 0 {
        let u = (sigma + 2.0 * nf - thetainf) / 4.0;
        let w = (sigma - 2.0 * nf - thetainf) / 4.0;
        let a = psi(-u)? + psi_tail - ipi;
        let b = psi(one + u)? + psi_tail;
        let d1 = e_pi_i(u) * rgamma(one - u) / fact;
        let d2 = rgamma(one + w) * (sign / fact);
        Ok(C2Matrix::new(a * d1, b * d2, d1, d2))
    } else {
        let u = (sigma - 2.0 * nf - thetainf) / 4.0;
        let w = (sigma + 2.0 * nf - thetainf) / 4.0;
        let a = psi(-u)? + psi_tail - ipi;
        let b = psi(one + u)? + psi_tail;
        let d1 = -e_pi_i(u) * rgamma(-u) / fact;
        let d2 = rgamma(w) * (sign / fact);
        Ok(C2Matrix::new(d1, d2, a * d1, b * d2))
    }
}

fn local_exponent(theta: Complex64, case: Option<IntegerCase>) -> C2Matrix {
    match case {
        None => C2Matrix::exp_j(c64(0.0, PI) * theta),
        Some(IntegerCase { n, delta }) => {
            let nil = match delta {
                DeltaStar::Plus => C2Matrix::DELTA_PLUS,
                DeltaStar::Minus => C2Matrix::DELTA_MINUS,
            };
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            (C2Matrix::I + nil.scale(two_pi_i())) * sign
        }
    }
}

fn c_pow(sqrt_c: Complex64) -> C2Matrix {
    C2Matrix::diag(sqrt_c.inv(), sqrt_c)
}

pub fn s_star(sigma: Complex64, theta0: Complex64, thetainf: Complex64) -> C2Matrix {
    let one = c64(1.0, 0.0);
    let k = two_pi_i() * rgamma(-(sigma - 2.0 * theta0 - thetainf) / 4.0) * rgamma(one - (sigma + 2.0 * theta0 - thetainf) / 4.0);
    C2Matrix::I - C2Matrix::DELTA_MINUS.scale(k)
}

pub fn s_star_star(sigma: Complex64, theta0: Complex64, thetainf: Complex64) -> C2Matrix {
    let one = c64(1.0, 0.0);
    let k = two_pi_i()
        * e_pi_i(-(sigma - thetainf) / 2.0)
        * rgamma((sigma + 2.0 * theta0 - thetainf) / 4.0)
        * rgamma(one + (sigma - 2.0 * theta0 - thetainf) / 4.0);
    C2Matrix::I + C2Matrix::DELTA_PLUS.scale(k)
}

fn unit_triangular_inv(s: &C2Matrix) -> C2Matrix {
    C2Matrix::new(s.a11, -s.a12, -s.a21, s.a22)
}

pub fn closed_form_factors(p: &Parameters) -> Result<ConnectionFactors, ClosedFormError> {
    if p.c0.norm() == 0.0 {
        return Err(ClosedFormError::ZeroConstant("c0"));
    }
    if p.cx.norm() == 0.0 {
        return Err(ClosedFormError::ZeroConstant("cx"));
    }
    let (s, ti) = (p.sigma, p.thetainf);
    let case0 = integer_case(p.theta0);
    let casex = integer_case(p.thetax);
    let v0 = match case0 {
        None => v_generic(s, p.theta0, ti),
        Some(c) => v_integer(s, c.n, ti)?,
    };
    let vx = match casex {
        None => v_generic(-s, p.thetax, ti),
        Some(c) => v_integer(-s, c.n, ti)?,
    };
    for v in [&v0, &vx] {
        let det = v.det();
        if !(det.norm() > 1e-300) || !det.is_finite() {
            return Err(ClosedFormError::Resonance("connection matrix V is singular"));
        }
    }
    let ss = s_star(s, p.theta0, ti);
    let sss = s_star_star(s, p.theta0, ti);
    let (sqrt_c0, sqrt_cx) = (p.c0.sqrt(), p.cx.sqrt());
    let quarter = c64(0.0, PI) * (s + ti) / 4.0;
    let c01 = v0 * unit_triangular_inv(&ss) * C2Matrix::exp_j(quarter) * c_pow(sqrt_c0);
    let c02 = v0 * unit_triangular_inv(&sss) * C2Matrix::exp_j(-quarter) * c_pow(sqrt_c0);
    let cx = vx * c_pow(sqrt_cx);
    Ok(ConnectionFactors {
        v0,
        vx,
        s_star: ss,
        s_star_star: sss,
        c01,
        c02,
        cx,
        e0: local_exponent(p.theta0, case0),
        ex: local_exponent(p.thetax, casex),
        integer_case_0: case0,
        integer_case_x: casex,
        sqrt_c0,
        sqrt_cx,
    })
}
