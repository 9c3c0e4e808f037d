use pv5_exec::Exec;
use pv5_flow::{integrate_with, rhs, FlowOptions, FlowState};
use pv5_series::Parameters;
use pv5_special::{c64, Complex64};

use crate::TranscendentError;

/// Values of `y`, `z`, `u` at one point.
///
/// When `pole` is set one of the quotient denominators is numerically zero and
/// the corresponding entries may be infinite or NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PVPoint {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
    pub u: Complex64,
    pub pole: bool,
}

/// Relative size below which a denominator counts as zero.
const POLE_THRESHOLD: f64 = 1e-13;

fn scale(s: &FlowState) -> f64 {
    s.a0.max_abs().max(s.ax.max_abs()).max(1.0)
}

/// `y`, `z`, `u` from the residues:
/// `y = (Ax)12 ((A0)11 + θ0/2) / ((A0)12 ((Ax)11 + θx/2))`,
/// `z = (A0)11 - θ0/2`, `u = -(A0)12 / ((A0)11 + θ0/2)`.
pub fn yzu_from_matrices(s: &FlowState) -> PVPoint {
    let p = &s.params;
    let n0 = s.a0.a11 + p.theta0 / 2.0;
    let dx = s.ax.a11 + p.thetax / 2.0;
    let tiny = POLE_THRESHOLD * scale(s);
    let pole = s.a0.a12.norm() < tiny || dx.norm() < tiny || n0.norm() < tiny;
    PVPoint {
        x: s.x,
        y: s.ax.a12 * n0 / (s.a0.a12 * dx),
        z: s.a0.a11 - p.theta0 / 2.0,
        u: -s.a0.a12 / n0,
        pole,
    }
}

/// Numerator and denominator of the `y` quotient with their `x`-derivatives
/// from the flow vector field: `(N, D, N', D')` with `y = N/D`.
pub(crate) fn quotient_parts(s: &FlowState) -> Result<[Complex64; 4], TranscendentError> {
    let p = &s.params;
    let (d0, dx) = rhs(s)?;
    let n0 = s.a0.a11 + p.theta0 / 2.0;
    let nx = s.ax.a11 + p.thetax / 2.0;
    Ok([
        s.ax.a12 * n0,
        s.a0.a12 * nx,
        dx.a12 * n0 + s.ax.a12 * d0.a11,
        d0.a12 * nx + s.a0.a12 * dx.a11,
    ])
}

/// `dy/dx` from the flow vector field and the quotient rule.
pub fn y_derivative(s: &FlowState) -> Result<Complex64, TranscendentError> {
    let [num, den, dnum, dden] = quotient_parts(s)?;
    if den.norm() < POLE_THRESHOLD * scale(s) {
        return Err(TranscendentError::PoleSample { x: s.x });
    }
    Ok((dnum * den - num * dden) / (den * den))
}

/// Straight-line transport of a refined state to `x`.
pub fn transport_to(s: &FlowState, x: Complex64, tol: f64) -> Result<FlowState, TranscendentError> {
    Ok(integrate_with(s, &[x], &FlowOptions::with_tol(tol))?.0)
}

/// The individual terms of `(V)` as `[y'', (1/(2y) + 1/(y-1)) y'^2, -y'/x, rational, linear, last]`.
fn equation_terms(p: &Parameters, x: Complex64, y: Complex64, y1: Complex64, y2: Complex64) -> [Complex64; 6] {
    let a = p.theta0 - p.thetax + p.thetainf;
    let b = p.theta0 - p.thetax - p.thetainf;
    let one = c64(1.0, 0.0);
    [
        y2,
        (one / (2.0 * y) + one / (y - 1.0)) * y1 * y1,
        -y1 / x,
        (y - 1.0) * (y - 1.0) / (8.0 * x * x) * (a * a * y - b * b / y),
        (one - p.theta0 - p.thetax) * y / x,
        -y * (y + 1.0) / (2.0 * (y - 1.0)),
    ]
}

/// `y'' - RHS` of `(V)` for given values of `y`, `y'`, `y''` at `x`.
/// Only the exponents `θ0, θx, θ∞` of `p` enter.
pub fn pv_equation_residual(p: &Parameters, x: Complex64, y: Complex64, y1: Complex64, y2: Complex64) -> Complex64 {
    let t = equation_terms(p, x, y, y1, y2);
    t[0] - (t[1] + t[2] + t[3] + t[4] + t[5])
}

/// Finite-difference formula for `y'` and `y''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// `x`, `x ± h`: second-order accurate.
    #[default]
    Three,
    /// `x`, `x ± h`, `x ± 2h`: fourth-order accurate.
    Five,
}

impl Stencil {
    fn offsets(self) -> &'static [f64] {
        match self {
            Stencil::Three => &[-1.0, 0.0, 1.0],
            Stencil::Five => &[-2.0, -1.0, 0.0, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    pub h: f64,
    pub stencil: Stencil,
    /// Unit direction of the stencil in the `x`-plane.
    pub direction: Complex64,
    pub flow_tol: f64,
    pub exec: Exec,
}

impl ResidualOptions {
    pub fn new(h: f64) -> Self {
        Self { h, stencil: Stencil::Three, direction: c64(0.0, 1.0), flow_tol: 1e-12, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub x: Complex64,
    pub y: Complex64,
    pub dy: Complex64,
    pub d2y: Complex64,
    pub residual: f64,
    /// Largest magnitude among the terms of the equation.
    pub scale: f64,
}

/// Absolute residual of `(V)` at `s.x` with step `h` along the imaginary direction.
pub fn pv_residual(s: &FlowState, h: f64) -> Result<f64, TranscendentError> {
    pv_residual_with(s, &ResidualOptions::new(h)).map(|r| r.residual)
}

pub fn pv_residual_with(s: &FlowState, o: &ResidualOptions) -> Result<ResidualReport, TranscendentError> {
    let offsets = o.stencil.offsets();
    let step = o.direction * o.h;
    let samples = o.exec.map(offsets, |&k| -> Result<Complex64, TranscendentError> {
        let at = if k == 0.0 { *s } else { transport_to(s, s.x + step * k, o.flow_tol)? };
        let pt = yzu_from_matrices(&at);
        let y = pt.y;
        if pt.pole || !y.is_finite() || y.norm() < 1e-8 || (y - 1.0).norm() < 1e-8 {
            return Err(TranscendentError::StencilHitsPole { x: s.x });
        }
        Ok(y)
    });
    let v = samples.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (y, dy, d2y) = match o.stencil {
        Stencil::Three => (v[1], (v[2] - v[0]) / (2.0 * step), (v[2] - 2.0 * v[1] + v[0]) / (step * step)),
        Stencil::Five => (
            v[2],
            (-v[4] + 8.0 * v[3] - 8.0 * v[1] + v[0]) / (12.0 * step),
            (-v[4] + 16.0 * v[3] - 30.0 * v[2] + 16.0 * v[1] - v[0]) / (12.0 * step * step),
        ),
    };
    let terms = equation_terms(&s.params, s.x, y, dy, d2y);
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let residual = pv_equation_residual(&s.params, s.x, y, dy, d2y).norm();
    Ok(ResidualReport { x: s.x, y, dy, d2y, residual, scale })
}
