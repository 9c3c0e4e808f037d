//! `H(x) = d/dx log τ(x)` from residue pairs, its expansion near `x = i∞`,
//! and the fourth-order bilinear equation written through `H` alone.
//!
//! `τ` is only defined up to a constant factor and is never formed; the
//! bilinear equation is homogeneous of degree two, so dividing by `τ²` leaves
//! an expression in `τ^{(k)}/τ`, which are polynomials in `H` and its
//! derivatives.

use pv5_exec::Exec;
use pv5_flow::{integrate_with, FlowError, FlowOptions, FlowState};
use pv5_series::{gamma_quad, Parameters, SeriesError};
use pv5_special::{c64, BranchedLog, C2Matrix, Complex64};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TauError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("x = 0 is not admissible")]
    Origin,
}

/// `H` evaluated by both algebraically equivalent expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlogTau {
    /// `x^{-1} tr(A0 Ax) - tr(A0 J/2) - θ∞/2`.
    pub value: Complex64,
    /// `(Ax)11 + x^{-1}(2(A0)11(Ax)11 + (A0)12(Ax)21 + (A0)21(Ax)12)`.
    pub alternate: Complex64,
}

impl DlogTau {
    /// The two agree whenever `tr A0 = 0` and `(A0 + Ax)11 = -θ∞/2`.
    pub fn gap(&self) -> f64 {
        (self.value - self.alternate).norm()
    }
}

pub fn dlog_tau_forms(s: &FlowState) -> Result<DlogTau, TauError> {
    if s.x.norm() == 0.0 {
        return Err(TauError::Origin);
    }
    let (a, b) = (&s.a0, &s.ax);
    let ix = s.x.inv();
    let value = (*a * *b).trace() * ix - (*a * C2Matrix::J).trace() / 2.0 - s.params.thetainf / 2.0;
    let alternate = b.a11 + ix * (2.0 * a.a11 * b.a11 + a.a12 * b.a21 + a.a21 * b.a12);
    Ok(DlogTau { value, alternate })
}

/// `d/dx log τ` at the state's point.
pub fn dlog_tau(s: &FlowState) -> Result<Complex64, TauError> {
    dlog_tau_forms(s).map(|d| d.value)
}

/// Which terms of the expansion of `H` to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauSeriesTerms {
    /// `-(σ+θ∞)/4 - (σ²-θ∞²)/(8x) - γ0-γx+ e^x x^{σ-2} + γ0+γx- e^{-x} x^{-σ-2}`.
    /// The remainder is `O(x^{-2})`.
    #[default]
    Leading,
    /// Adds `-((σ+θ∞)γ0+γ0- + (σ-θ∞)γx+γx-)/(2x²)`; remainder `O(x^{-3})` plus
    /// the unprinted `x^{-1}` corrections of the exponential terms.
    WithInverseSquare,
}

/// Expansion of `H` with the default terms.
pub fn dlog_tau_series(p: &Parameters, x: Complex64) -> Result<Complex64, TauError> {
    dlog_tau_series_with(p, x, TauSeriesTerms::Leading)
}

pub fn dlog_tau_series_with(p: &Parameters, x: Complex64, terms: TauSeriesTerms) -> Result<Complex64, TauError> {
    if x.norm() == 0.0 {
        return Err(TauError::Origin);
    }
    let g = gamma_quad(p)?;
    let (s, ti) = (p.sigma, p.thetainf);
    let lx = BranchedLog::upper(x);
    let mut h = -(s + ti) / 4.0 - (s * s - ti * ti) / (8.0 * x);
    if terms == TauSeriesTerms::WithInverseSquare {
        h -= ((s + ti) * g.p0() + (s - ti) * g.px()) / (2.0 * x * x);
    }
    h -= g.g0m * g.gxp * x.exp() * lx.pow(s - 2.0);
    h += g.g0p * g.gxm * (-x).exp() * lx.pow(-s - 2.0);
    Ok(h)
}

/// `H` and finite-difference estimates of `H'`, `H''`, `H'''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSample {
    pub x: Complex64,
    pub dlogtau: Complex64,
    pub higher_derivs: Option<[Complex64; 3]>,
}

/// The ratios `τ'/τ, τ''/τ, τ'''/τ, τ''''/τ` from `H, H', H'', H'''`.
pub fn tau_ratios(h: [Complex64; 4]) -> [Complex64; 4] {
    let [h0, h1, h2, h3] = h;
    [
        h0,
        h1 + h0 * h0,
        h2 + 3.0 * h0 * h1 + h0 * h0 * h0,
        h3 + 4.0 * h0 * h2 + 3.0 * h1 * h1 + 6.0 * h0 * h0 * h1 + h0 * h0 * h0 * h0,
    ]
}

/// The terms of the bilinear equation divided by `τ²`, in display order.
pub fn bilinear_terms(p: &Parameters, x: Complex64, h: [Complex64; 4]) -> [Complex64; 6] {
    let [t1, t2, t3, t4] = tau_ratios(h);
    let (t0, tx, ti) = (p.theta0, p.thetax, p.thetainf);
    let sq = t0 * t0 + tx * tx;
    [
        x * x * x * (t4 - 4.0 * t1 * t3 + 3.0 * t2 * t2),
        4.0 * x * x * (t3 - t1 * t2),
        -(x * x - 2.0 * ti * x + sq) * x * (t2 - t1 * t1),
        2.0 * x * t2,
        (ti * x - sq) * t1,
        -tx * tx * ti / 2.0,
    ]
}

/// Left-hand side of the bilinear equation divided by `τ²`.
pub fn bilinear_from_derivatives(p: &Parameters, x: Complex64, h: [Complex64; 4]) -> Complex64 {
    bilinear_terms(p, x, h).iter().sum()
}

/// Difference formulas for `H'`, `H''`, `H'''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DifferenceOrder {
    /// Central differences on `x + kh`, `|k| <= 2`.
    #[default]
    Second,
    /// Central differences on `|k| <= 3`.
    Fourth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearOptions {
    pub h: f64,
    pub order: DifferenceOrder,
    /// Unit direction of the stencil.
    pub direction: Complex64,
    pub flow_tol: f64,
    pub exec: Exec,
}

impl BilinearOptions {
    pub fn new(h: f64) -> Self {
        Self { h, order: DifferenceOrder::Second, direction: c64(0.0, 1.0), flow_tol: 1e-12, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearReport {
    pub sample: TauSample,
    pub residual: Complex64,
    /// Largest magnitude among the terms of the equation.
    pub scale: f64,
}

impl BilinearReport {
    pub fn normalized(&self) -> f64 {
        self.residual.norm() / self.scale
    }
}

/// Bilinear residual at `s.x`, with `H` sampled by flow transport along the stencil.
pub fn bilinear_residual(s: &FlowState, h: f64) -> Result<BilinearReport, TauError> {
    bilinear_residual_with(s, &BilinearOptions::new(h))
}

pub fn bilinear_residual_with(s: &FlowState, o: &BilinearOptions) -> Result<BilinearReport, TauError> {
    let reach: i32 = match o.order {
        DifferenceOrder::Second => 2,
        DifferenceOrder::Fourth => 3,
    };
    let ks: Vec<i32> = (-reach..=reach).collect();
    let step = o.direction * o.h;
    let opts = FlowOptions::with_tol(o.flow_tol);
    let values = o.exec.map(&ks, |&k| -> Result<Complex64, TauError> {
        if k == 0 {
            return dlog_tau(s);
        }
        let (t, _) = integrate_with(s, &[s.x + step * k as f64], &opts)?;
        dlog_tau(&t)
    });
    let v = values.into_iter().collect::<Result<Vec<_>, _>>()?;
    let f = |k: i32| v[(k + reach) as usize];
    let (d1, d2, d3) = match o.order {
        DifferenceOrder::Second => (
            (f(1) - f(-1)) / (2.0 * step),
            (f(1) - 2.0 * f(0) + f(-1)) / (step * step),
            (f(2) - 2.0 * f(1) + 2.0 * f(-1) - f(-2)) / (2.0 * step * step * step),
        ),
        DifferenceOrder::Fourth => (
            (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * step),
            (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) / (12.0 * step * step),
            (-f(3) + 8.0 * f(2) - 13.0 * f(1) + 13.0 * f(-1) - 8.0 * f(-2) + f(-3)) / (8.0 * step * step * step),
        ),
    };
    let hs = [f(0), d1, d2, d3];
    let terms = bilinear_terms(&s.params, s.x, hs);
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    Ok(BilinearReport {
        sample: TauSample { x: s.x, dlogtau: f(0), higher_derivs: Some([d1, d2, d3]) },
        residual: terms.iter().sum(),
        scale,
    })
}
