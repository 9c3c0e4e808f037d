use pv5_exec::Exec;
use pv5_series::{domain_check, series_a_pair_unchecked, Parameters, Truncation};
use pv5_special::{c64, C2Matrix, Complex64};

use crate::{integrate_with, FlowError, FlowOptions, FlowReport, FlowState};

/// How the series seed is prepared before transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedOptions {
    pub truncation: Truncation,
    /// Rescale the off-diagonal pairs so that both determinants hold exactly.
    pub project: bool,
}

impl Default for SeedOptions {
    fn default() -> Self {
        Self { truncation: Truncation::L1, project: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOptions {
    pub seed_radius: f64,
    pub x_target: Complex64,
    pub seed: SeedOptions,
    pub flow: FlowOptions,
    /// Intermediate points between the seed and the target, for detours.
    pub waypoints: Vec<Complex64>,
    /// Repeat from twice the seed radius and report the difference.
    pub convergence_check: bool,
    pub exec: Exec,
}

impl RefineOptions {
    pub fn new(seed_radius: f64, x_target: Complex64, tol: f64) -> Self {
        Self {
            seed_radius,
            x_target,
            seed: SeedOptions::default(),
            flow: FlowOptions::with_tol(tol),
            waypoints: Vec::new(),
            convergence_check: true,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub state: FlowState,
    pub report: FlowReport,
    /// Determinant defect of the raw seed, a proxy for its truncation error.
    pub seed_truncation: f64,
    /// Entrywise change at the target when the seed radius is doubled.
    pub convergence: Option<f64>,
}

/// Series seed at `i·radius`, optionally projected onto the determinant constraints.
pub fn seed_state(p: &Parameters, radius: f64, seed: &SeedOptions) -> Result<(FlowState, f64), FlowError> {
    let pair = series_a_pair_unchecked(p, c64(0.0, radius), seed.truncation)?;
    let (d0, dx) = pair.det_defect(p);
    let mut s = FlowState::from_pair(&pair, *p);
    if seed.project {
        s.a0 = project(s.a0, p.theta0);
        s.ax = project(s.ax, p.thetax);
    }
    Ok((s, d0.max(dx)))
}

fn project(a: C2Matrix, theta: Complex64) -> C2Matrix {
    let prod = a.a12 * a.a21;
    if prod.norm() == 0.0 {
        return a;
    }
    let k = ((theta * theta / 4.0 - a.a11 * a.a11) / prod).sqrt();
    if !k.is_finite() {
        return a;
    }
    C2Matrix::traceless(a.a11, a.a12 * k, a.a21 * k)
}

/// Seed at `i·seed_radius` and transport to `x_target` along a straight line.
pub fn refine_from_series(p: &Parameters, seed_radius: f64, x_target: Complex64, tol: f64) -> Result<Refined, FlowError> {
    refine_with(p, &RefineOptions::new(seed_radius, x_target, tol))
}

pub fn refine_with(p: &Parameters, o: &RefineOptions) -> Result<Refined, FlowError> {
    let seed_x = c64(0.0, o.seed_radius);
    if !domain_check(p, seed_x, 0.1) {
        return Err(pv5_series::SeriesError::OutsideDomain { x: seed_x }.into());
    }
    if o.x_target.norm() < 20.0 {
        return Err(FlowError::TargetTooClose(o.x_target.norm()));
    }
    let mut path = o.waypoints.clone();
    path.push(o.x_target);
    let run = |radius: f64, lead_in: Option<Complex64>| -> Result<(FlowState, FlowReport, f64), FlowError> {
        let (s, trunc) = seed_state(p, radius, &o.seed)?;
        let full: Vec<Complex64> = lead_in.into_iter().chain(path.iter().copied()).collect();
        let (end, report) = integrate_with(&s, &full, &o.flow)?;
        Ok((end, report, trunc))
    };
    let (main, check) = if o.convergence_check {
        let (a, b) = o.exec.join(|| run(o.seed_radius, None), || run(2.0 * o.seed_radius, Some(seed_x)));
        (a, Some(b))
    } else {
        (run(o.seed_radius, None), None)
    };
    let (state, report, seed_truncation) = main?;
    let convergence = match check {
        Some(r) => Some(r?.0.distance(&state)),
        None => None,
    };
    Ok(Refined { state, report, seed_truncation, convergence })
}
