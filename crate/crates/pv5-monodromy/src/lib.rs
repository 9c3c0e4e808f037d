//! Monodromy data of
//!
//! ```text
//! dY/dλ = (A0/λ + Ax/(λ - x) + J/2) Y
//! ```
//!
//! computed by integrating the linear system around closed loops based at
//! `λ0 = iR`, starting from the solution normalised by its formal expansion at
//! infinity. `M_p` is defined by `Y ↦ Y·M_p` after continuation around `p`.

mod data;
mod frame;
mod loops;

pub use data::{braid_shift, MonodromyData, StructuralDefects};
pub use frame::{formal_coefficients, formal_solution, min_radius, normalized_frame, FrameKind};
pub use loops::{LoopSpec, Segment};

use pv5_exec::Exec;
use pv5_flow::FlowState;
use pv5_ode::{OdeError, Options};
use pv5_special::{C2Matrix, Complex64};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonodromyError {
    #[error("normalisation radius {radius} is below the required {need}")]
    RadiusTooSmall { radius: f64, need: f64 },
    #[error("loop passes within {distance} of the singular point {point}")]
    TooCloseToSingularity { point: Complex64, distance: f64 },
    #[error("invalid loop: {0}")]
    InvalidLoop(&'static str),
    #[error("continuation failed: {0}")]
    Ode(#[from] OdeError),
    #[error("frame at the base point is singular")]
    SingularFrame,
    #[error("Stokes trace identity violated by {0:e}")]
    Inconsistent(f64),
    #[error("braid shifts must be even, got {0}")]
    OddBraidStep(i64),
}

/// Minimum distance a loop must keep from `0` and `x`.
pub const MIN_CLEARANCE: f64 = 0.5;

/// Analytic continuation of `Y0` (the value at `path.base_point`) along `path`.
pub fn continue_along(s: &FlowState, y0: C2Matrix, path: &LoopSpec, tol: f64) -> Result<C2Matrix, MonodromyError> {
    for p in [Complex64::new(0.0, 0.0), s.x] {
        let d = path.min_distance(p);
        if d < MIN_CLEARANCE {
            return Err(MonodromyError::TooCloseToSingularity { point: p, distance: d });
        }
    }
    let opts = Options { rtol: tol, atol: tol, ..Options::default() };
    let mut y = y0;
    for seg in &path.segments {
        let field = |t: f64, v: &[Complex64; 4]| {
            let (lam, dlam) = seg.at(t);
            let coef = s.a0.scale(lam.inv()) + s.ax.scale((lam - s.x).inv()) + C2Matrix::J * 0.5;
            (coef * C2Matrix::from_array(*v)).scale(dlam).to_array()
        };
        let (v, _) = pv5_ode::integrate(field, 0.0, y.to_array(), seg.length(), &opts)?;
        y = C2Matrix::from_array(v);
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyOptions {
    /// Normalisation radius; `max(200, 4(|x| + 10))` when `None`.
    pub radius: Option<f64>,
    pub frame: FrameKind,
    /// Combine radii `R` and `2R` as `2·M(2R) - M(R)`.
    pub richardson: bool,
    pub tol: f64,
    /// Radius of the small circles about `0` and `x`.
    pub circle_radius: f64,
    /// Largest tolerated violation of the Stokes trace identity.
    pub consistency_limit: f64,
    pub exec: Exec,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self {
            radius: None,
            frame: FrameKind::default(),
            richardson: true,
            tol: 1e-12,
            circle_radius: 1.0,
            consistency_limit: 1e-6,
            exec: Exec::default(),
        }
    }
}

/// The datum together with what was needed to get it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyReport {
    pub data: MonodromyData,
    pub radius: f64,
    /// `max |M(2R) - M(R)|` when both radii were computed.
    pub radius_change: Option<f64>,
}

pub fn monodromy(s: &FlowState, tol: f64) -> Result<MonodromyData, MonodromyError> {
    let opts = MonodromyOptions { tol, ..MonodromyOptions::default() };
    monodromy_with(s, &opts).map(|r| r.data)
}

pub fn monodromy_with(s: &FlowState, o: &MonodromyOptions) -> Result<MonodromyReport, MonodromyError> {
    let radius = o.radius.unwrap_or_else(|| min_radius(s.x).max(200.0));
    let radii: Vec<f64> = if o.richardson { vec![radius, 2.0 * radius] } else { vec![radius] };
    let mut jobs = Vec::new();
    for &r in &radii {
        jobs.push((r, false));
        jobs.push((r, true));
    }
    let results = o.exec.map(&jobs, |&(r, around_origin)| one_loop(s, r, around_origin, o));
    let mut mats = Vec::with_capacity(results.len());
    for m in results {
        mats.push(m?);
    }
    let (m0, mx, radius_change) = if o.richardson {
        let (mx1, m01, mx2, m02) = (mats[0], mats[1], mats[2], mats[3]);
        let change = (mx2 - mx1).max_abs().max((m02 - m01).max_abs());
        (m02 * 2.0 - m01, mx2 * 2.0 - mx1, Some(change))
    } else {
        (mats[1], mats[0], None)
    };
    let data = MonodromyData::from_pair(m0, mx, s.params.thetainf);
    let defect = data.stokes_trace_defect(s.params.thetainf);
    if !(defect <= o.consistency_limit) {
        return Err(MonodromyError::Inconsistent(defect));
    }
    Ok(MonodromyReport { data, radius, radius_change })
}

fn one_loop(s: &FlowState, radius: f64, around_origin: bool, o: &MonodromyOptions) -> Result<C2Matrix, MonodromyError> {
    let path = if around_origin {
        LoopSpec::around_origin(s.x, radius, o.circle_radius)
    } else {
        LoopSpec::around_x(s.x, radius, o.circle_radius)
    };
    let y0 = normalized_frame(s, radius, o.frame)?;
    let y1 = continue_along(s, y0, &path, o.tol)?;
    let inv = y0.inv().map_err(|_| MonodromyError::SingularFrame)?;
    Ok(inv * y1)
}
