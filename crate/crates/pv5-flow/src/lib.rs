//! Transport of `(A0, Ax)` in `x` along the isomonodromic flow
//!
//! ```text
//! dA0/dx = [Ax, A0]/x,    dAx/dx = [A0, Ax]/x + [J, Ax]/2.
//! ```
//!
//! Paths are polylines in the `x`-plane, each leg integrated in its own
//! arclength with the adaptive Dormand–Prince pair from `pv5-ode`.

mod refine;
mod state;

pub use refine::{refine_from_series, refine_with, seed_state, RefineOptions, Refined, SeedOptions};
pub use state::{FlowInvariants, FlowState};

use pv5_ode::{Control, OdeError, Options, Stats};
use pv5_series::SeriesError;
use pv5_special::{C2Matrix, Complex64};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("the vector field is singular at x = 0")]
    Origin,
    #[error("path leg from {from} to {to} passes within {min_radius} of the origin")]
    PathThroughOrigin { from: Complex64, to: Complex64, min_radius: f64 },
    #[error("step size underflow near x = {x} (h = {h:e}); a pole of the solution is likely nearby")]
    StepUnderflow { x: Complex64, h: f64 },
    #[error("step budget exhausted near x = {x}")]
    TooManySteps { x: Complex64 },
    #[error("target |x| = {0} is below the admissible minimum of 20")]
    TargetTooClose(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Integration settings for [`integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub tol: f64,
    /// Ceiling on the arclength step; the entries of `Ax` oscillate like `e^{±x}`.
    pub h_max: f64,
    /// No leg may come closer than this to `x = 0`.
    pub min_radius: f64,
    /// A state whose entries exceed this size is treated as a pole hit.
    pub blowup: f64,
    pub max_steps: usize,
}

impl FlowOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-12, h_max: 0.5, min_radius: 1.0, blowup: 1e8, max_steps: 2_000_000 }
    }
}

/// Work and drift bookkeeping for one transport.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlowReport {
    pub stats: Stats,
    pub arclength: f64,
    /// Largest change of any flow invariant seen at an accepted step.
    pub max_drift: f64,
}

/// The derivative `(dA0/dx, dAx/dx)` at a state.
pub fn rhs(s: &FlowState) -> Result<(C2Matrix, C2Matrix), FlowError> {
    if s.x == Complex64::new(0.0, 0.0) {
        return Err(FlowError::Origin);
    }
    Ok(rhs_at(s.x, &s.a0, &s.ax))
}

pub(crate) fn rhs_at(x: Complex64, a0: &C2Matrix, ax: &C2Matrix) -> (C2Matrix, C2Matrix) {
    let ix = x.inv();
    let d0 = ax.commutator(a0).scale(ix);
    let dx = a0.commutator(ax).scale(ix) + C2Matrix::J.commutator(ax) * 0.5;
    (d0, dx)
}

/// Straight-line transport to `x_target` with default options at tolerance `tol`.
pub fn integrate(s: &FlowState, x_target: Complex64, tol: f64) -> Result<FlowState, FlowError> {
    integrate_with(s, &[x_target], &FlowOptions::with_tol(tol)).map(|(s, _)| s)
}

/// Transport along the polyline `s.x -> waypoints[0] -> ... -> waypoints[n-1]`.
pub fn integrate_with(
    s: &FlowState,
    waypoints: &[Complex64],
    opts: &FlowOptions,
) -> Result<(FlowState, FlowReport), FlowError> {
    let mut from = s.x;
    for &to in waypoints {
        if segment_distance_to_origin(from, to) < opts.min_radius {
            return Err(FlowError::PathThroughOrigin { from, to, min_radius: opts.min_radius });
        }
        from = to;
    }
    let reference = s.invariants();
    let mut report = FlowReport::default();
    let mut cur = *s;
    for &to in waypoints {
        cur = leg(&cur, to, opts, &reference, &mut report)?;
    }
    Ok((cur, report))
}

fn segment_distance_to_origin(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.conj() * d).re / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

fn leg(
    s: &FlowState,
    to: Complex64,
    opts: &FlowOptions,
    reference: &FlowInvariants,
    report: &mut FlowReport,
) -> Result<FlowState, FlowError> {
    let d = to - s.x;
    let len = d.norm();
    if len == 0.0 {
        return Ok(FlowState { x: to, ..*s });
    }
    let dir = d / len;
    let x1 = s.x;
    let field = |t: f64, y: &[Complex64; 8]| {
        let (a0, ax) = unpack(y);
        let (d0, dx) = rhs_at(x1 + dir * t, &a0, &ax);
        pack(&d0.scale(dir), &dx.scale(dir))
    };
    let mut drift = report.max_drift;
    let blowup = opts.blowup;
    let params = s.params;
    let observe = |t: f64, y: &[Complex64; 8]| {
        let (a0, ax) = unpack(y);
        if !(a0.max_abs() < blowup && ax.max_abs() < blowup) {
            return Control::Stop(format!("state norm exceeded {blowup:e}"));
        }
        let now = FlowState { x: x1 + dir * t, a0, ax, params }.invariants();
        drift = drift.max(now.distance(reference));
        Control::Continue
    };
    let ode = Options {
        rtol: opts.tol,
        atol: opts.tol,
        h_max: opts.h_max,
        h_init: None,
        max_steps: opts.max_steps,
    };
    let result = pv5_ode::integrate_observed(field, 0.0, pack(&s.a0, &s.ax), len, &ode, observe);
    report.max_drift = drift;
    match result {
        Ok((y, stats)) => {
            report.stats += stats;
            report.arclength += len;
            let (a0, ax) = unpack(&y);
            Ok(FlowState { x: to, a0, ax, params })
        }
        Err(OdeError::StepUnderflow { t, h }) => Err(FlowError::StepUnderflow { x: x1 + dir * t, h }),
        Err(OdeError::Interrupted { t, .. }) => Err(FlowError::StepUnderflow { x: x1 + dir * t, h: 0.0 }),
        Err(OdeError::TooManySteps { t, .. }) => Err(FlowError::TooManySteps { x: x1 + dir * t }),
        Err(OdeError::BadInterval { .. }) => unreachable!("leg lengths are finite and non-negative"),
    }
}

fn pack(a0: &C2Matrix, ax: &C2Matrix) -> [Complex64; 8] {
    let a = a0.to_array();
    let b = ax.to_array();
    [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
}

fn unpack(y: &[Complex64; 8]) -> (C2Matrix, C2Matrix) {
    (
        C2Matrix::from_array([y[0], y[1], y[2], y[3]]),
        C2Matrix::from_array([y[4], y[5], y[6], y[7]]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use pv5_series::Parameters;
    use pv5_special::c64;

    fn st(x: Complex64, a0: C2Matrix, ax: C2Matrix) -> FlowState {
        FlowState { x, a0, ax, params: Parameters::real(0.0, 0.0, 0.0, c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)) }
    }

    #[test]
    fn diagonal_residues_are_stationary() {
        let s = st(c64(0.0, 3.0), C2Matrix::diag(c64(0.2, 0.0), c64(-0.2, 0.0)), C2Matrix::diag(c64(0.1, 1.0), c64(-0.1, -1.0)));
        let (d0, dx) = rhs(&s).unwrap();
        assert_eq!(d0.max_abs(), 0.0);
        assert_eq!(dx.max_abs(), 0.0);
    }

    #[test]
    fn commutator_example() {
        let s = st(c64(1.0, 0.0), C2Matrix::DELTA_PLUS, C2Matrix::DELTA_MINUS);
        let (d0, dx) = rhs(&s).unwrap();
        assert!((d0 + C2Matrix::J).max_abs() < 1e-15);
        assert!((dx - (C2Matrix::J - C2Matrix::DELTA_MINUS)).max_abs() < 1e-15);
    }

    #[test]
    fn origin_is_rejected() {
        let s = st(c64(0.0, 0.0), C2Matrix::ZERO, C2Matrix::ZERO);
        assert_eq!(rhs(&s), Err(FlowError::Origin));
    }

    #[test]
    fn leg_through_origin_is_rejected() {
        let s = st(c64(0.0, 5.0), C2Matrix::ZERO, C2Matrix::ZERO);
        let e = integrate(&s, c64(0.0, -5.0), 1e-10).unwrap_err();
        assert!(matches!(e, FlowError::PathThroughOrigin { .. }));
        assert!(integrate_with(&s, &[c64(-5.0, 0.0), c64(0.0, -5.0)], &FlowOptions::default()).is_ok());
    }

    #[test]
    fn distance_to_origin() {
        assert!((segment_distance_to_origin(c64(-1.0, 2.0), c64(1.0, 2.0)) - 2.0).abs() < 1e-15);
        assert!((segment_distance_to_origin(c64(3.0, 4.0), c64(6.0, 8.0)) - 5.0).abs() < 1e-15);
    }
}
