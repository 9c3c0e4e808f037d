use std::f64::consts::{FRAC_PI_2, PI};

use pv5_exec::Exec;
use pv5_flow::{refine_with, FlowOptions, FlowState, RefineOptions, SeedOptions};
use pv5_series::{gamma_quad, Parameters};
use pv5_special::{c64, Complex64};

use crate::point::{quotient_parts, transport_to};
use crate::TranscendentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootKind {
    Zero,
    Pole,
}

/// Which asymptotic lattice formula is used for the seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LatticeFormula {
    /// Zeros: `ρ0 = -4/(σ + 2θ0 - θ∞)`; poles: `ρ∞ = -(σ - 2θx + θ∞)/4`.
    #[default]
    Generic,
    /// Zeros: `ρ0 = -4/(σ + 2θx + θ∞)`; poles: `ρ∞ = -(σ - 2θ0 - θ∞)/4`.
    Alternate,
    /// One-parameter families: zeros of `y+` at `σ0 = -2θx - θ∞`, poles of `y-`
    /// at `σ0' = 2θ0 + θ∞`.
    Degenerate,
}

/// How well a parameter set fits the smallness hypotheses of the lattice
/// asymptotics. The constants involved are not constructive, so this is advisory.
#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    /// Must be small for the lattice asymptotics to apply.
    pub smallness: f64,
    /// Must stay bounded for the lattice asymptotics to apply.
    pub boundedness: f64,
    /// `(|γ0-γx+| + |γ0+γx-| + Σ|γ| + 1)(Σ|γ| + 1)`, which scales the admissible strip.
    pub gamma_product: f64,
    /// The non-vanishing conditions on the exponents hold.
    pub exponents_ok: bool,
    pub warning: Option<String>,
}

/// Heuristic threshold on [`Admissibility::smallness`].
pub const SMALLNESS_WARNING: f64 = 0.1;

pub fn admissibility(p: &Parameters, kind: RootKind, formula: LatticeFormula) -> Result<Admissibility, TranscendentError> {
    let (t0, tx, ti, s) = (p.theta0, p.thetax, p.thetainf, p.sigma);
    let zero = |z: Complex64| z.norm() == 0.0;
    let (smallness, boundedness, exponents_ok) = match (kind, formula) {
        (RootKind::Zero, LatticeFormula::Degenerate) => {
            (p.c().norm(), 0.0, !zero(tx) && !zero(t0 - tx - ti) && (s - p.sigma0()).norm() < 1e-10)
        }
        (RootKind::Pole, LatticeFormula::Degenerate) => {
            (p.c_prime().norm(), 0.0, !zero(t0) && !zero(tx - t0 - ti) && (s - p.sigma0_prime()).norm() < 1e-10)
        }
        (RootKind::Zero, f) => {
            let c = p.c();
            let (den, other) = if f == LatticeFormula::Generic {
                (s + 2.0 * t0 - ti, s + 2.0 * tx + ti)
            } else {
                (s + 2.0 * tx + ti, s + 2.0 * t0 - ti)
            };
            let ok = !zero(tx) && !zero(t0 + tx - ti) && !zero(t0 - tx - ti);
            ((4.0 * c / den).norm(), (other / c).norm(), ok)
        }
        (RootKind::Pole, f) => {
            let c = p.c();
            let (den, other) = if f == LatticeFormula::Generic {
                (s - 2.0 * tx + ti, s - 2.0 * t0 - ti)
            } else {
                (s - 2.0 * t0 - ti, s - 2.0 * tx + ti)
            };
            let ok = !zero(t0) && !zero(t0 - tx + ti) && !zero(-t0 - tx + ti);
            ((4.0 / (c * den)).norm(), (c * other).norm(), ok)
        }
    };
    let g = gamma_quad(p)?;
    let sum = g.g0p.norm() + g.g0m.norm() + g.gxp.norm() + g.gxm.norm();
    let gamma_product = ((g.g0m * g.gxp).norm() + (g.g0p * g.gxm).norm() + sum + 1.0) * (sum + 1.0);
    let warning = if !exponents_ok {
        Some("exponent non-vanishing conditions fail".to_string())
    } else if !(smallness < SMALLNESS_WARNING) {
        Some(format!("smallness quantity {smallness:.3e} exceeds the heuristic {SMALLNESS_WARNING}"))
    } else {
        None
    };
    Ok(Admissibility { smallness, boundedness, gamma_product, exponents_ok, warning })
}

/// Asymptotic positions `x_m = 2mπi - (σ ± 1) log(2mπi) - log(K)` of zeros or poles.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedLattice {
    pub kind: RootKind,
    pub formula: LatticeFormula,
    /// `ρ0(σ)` or `ρ∞(σ)`; for the degenerate families the `c`-free factor of `K`.
    pub rho: Complex64,
    /// The argument `K` of the last logarithm (`ρ c` in the two-parameter case).
    pub log_argument: Complex64,
    pub seeds: Vec<(i64, Complex64)>,
    pub admissibility: Admissibility,
}

impl SeedLattice {
    /// Bound on `|x_{m+1} - x_m - 2πi|` implied by the formula.
    pub fn spacing_bound(sigma: Complex64, m: i64) -> f64 {
        4.0 * (sigma.norm() + 1.0) * ((m + 1) as f64).ln() / m as f64
    }
}

pub fn zero_pole_seeds(p: &Parameters, kind: RootKind, m_from: i64, m_to: i64) -> Result<SeedLattice, TranscendentError> {
    zero_pole_seeds_with(p, kind, LatticeFormula::Generic, m_from, m_to)
}

pub fn zero_pole_seeds_with(
    p: &Parameters,
    kind: RootKind,
    formula: LatticeFormula,
    m_from: i64,
    m_to: i64,
) -> Result<SeedLattice, TranscendentError> {
    if m_from < 1 || m_to < m_from {
        return Err(TranscendentError::BadRange { from: m_from, to: m_to });
    }
    let (t0, tx, ti) = (p.theta0, p.thetax, p.thetainf);
    let sigma = match formula {
        LatticeFormula::Degenerate if kind == RootKind::Zero => p.sigma0(),
        LatticeFormula::Degenerate => p.sigma0_prime(),
        _ => p.sigma,
    };
    let constant = |z: Complex64, what: &'static str| {
        if z.norm() == 0.0 || !z.is_finite() {
            Err(TranscendentError::DivisionByZero(what))
        } else {
            Ok(z)
        }
    };
    let (rho, log_argument) = match (kind, formula) {
        (RootKind::Zero, LatticeFormula::Generic) => {
            let rho = constant(-4.0 / (sigma + 2.0 * t0 - ti), "ρ0")?;
            (rho, rho * p.c())
        }
        (RootKind::Zero, LatticeFormula::Alternate) => {
            let rho = constant(-4.0 / (sigma + 2.0 * tx + ti), "ρ0")?;
            (rho, rho * p.c())
        }
        (RootKind::Pole, LatticeFormula::Generic) => {
            let rho = -(sigma - 2.0 * tx + ti) / 4.0;
            (rho, rho * p.c())
        }
        (RootKind::Pole, LatticeFormula::Alternate) => {
            let rho = -(sigma - 2.0 * t0 - ti) / 4.0;
            (rho, rho * p.c())
        }
        (RootKind::Zero, LatticeFormula::Degenerate) => {
            let rho = constant(-2.0 / (t0 - tx - ti), "θ0 - θx - θ∞")?;
            (rho, rho * p.c())
        }
        (RootKind::Pole, LatticeFormula::Degenerate) => {
            // x = ... + log(2c'/(θx - θ0 - θ∞)) = ... - log(((θx - θ0 - θ∞)/2)/c').
            let rho = (tx - t0 - ti) / 2.0;
            (rho, rho / p.c_prime())
        }
    };
    // A signed zero imaginary part would flip the principal log of a negative constant.
    let log_argument = c64(log_argument.re, log_argument.im + 0.0);
    let log_k = constant(log_argument, "lattice constant")?.ln();
    let shift = if kind == RootKind::Zero { sigma + 1.0 } else { sigma - 1.0 };
    let seeds = (m_from..=m_to)
        .map(|m| {
            let two_m_pi = 2.0 * PI * m as f64;
            let log_base = c64(two_m_pi.ln(), FRAC_PI_2);
            (m, c64(0.0, two_m_pi) - shift * log_base - log_k)
        })
        .collect();
    let admissibility = admissibility(p, kind, formula)?;
    Ok(SeedLattice { kind, formula, rho, log_argument, seeds, admissibility })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Stop once `|y|` (zeros) or `|1/y|` (poles) is at most this.
    pub tol: f64,
    pub flow_tol: f64,
    pub max_iterations: usize,
    /// Series seed radius; default `max(400, |x| + 200)`.
    pub seed_radius: Option<f64>,
    /// Largest Newton step; a fraction of the lattice spacing `2π`.
    pub max_step: f64,
    pub seed: SeedOptions,
    pub exec: Exec,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            flow_tol: 1e-12,
            max_iterations: 30,
            seed_radius: None,
            max_step: 1.0,
            seed: SeedOptions::default(),
            exec: Exec::default(),
        }
    }
}

impl RootOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootRefinement {
    pub seed: Complex64,
    pub root: Complex64,
    /// `|y|` or `|1/y|` at the root.
    pub value: f64,
    pub iterations: usize,
    pub state: FlowState,
}

/// Newton refinement with default options.
pub fn refine_root(p: &Parameters, seed: Complex64, kind: RootKind, tol: f64) -> Result<RootRefinement, TranscendentError> {
    refine_root_with(p, seed, kind, &RootOptions::with_tol(tol))
}

/// `f = y` or `f = 1/y` and `f'`, with `f'` from the flow vector field.
fn target(s: &FlowState, kind: RootKind) -> Result<(Complex64, Complex64), TranscendentError> {
    let [n, d, dn, dd] = quotient_parts(s)?;
    let (num, den, dnum, dden) = match kind {
        RootKind::Zero => (n, d, dn, dd),
        RootKind::Pole => (d, n, dd, dn),
    };
    if den.norm() == 0.0 {
        return Err(TranscendentError::PoleSample { x: s.x });
    }
    Ok((num / den, (dnum * den - num * dden) / (den * den)))
}

/// Newton iteration on `y` (zeros) or `1/y` (poles) started at `seed`.
/// The state is transported from a series seed high on the imaginary axis
/// and then along each Newton step.
pub fn refine_root_with(
    p: &Parameters,
    seed: Complex64,
    kind: RootKind,
    o: &RootOptions,
) -> Result<RootRefinement, TranscendentError> {
    let radius = o.seed_radius.unwrap_or_else(|| (seed.norm() + 200.0).max(400.0));
    let ro = RefineOptions {
        seed: o.seed,
        flow: FlowOptions::with_tol(o.flow_tol),
        convergence_check: false,
        exec: Exec::Sequential,
        ..RefineOptions::new(radius, seed, o.flow_tol)
    };
    let mut state = refine_with(p, &ro)?.state;
    let mut last = f64::INFINITY;
    for it in 0..=o.max_iterations {
        let (f, df) = target(&state, kind)?;
        last = f.norm();
        if last <= o.tol {
            return Ok(RootRefinement { seed, root: state.x, value: last, iterations: it, state });
        }
        if it == o.max_iterations || df.norm() == 0.0 || !f.is_finite() {
            break;
        }
        let mut dx = -f / df;
        if dx.norm() > o.max_step {
            dx *= o.max_step / dx.norm();
        }
        state = transport_to(&state, state.x + dx, o.flow_tol)?;
    }
    Err(TranscendentError::NoConvergence { seed, iterations: o.max_iterations, residual: last })
}

/// Refine every seed of a lattice; independent refinements run under `o.exec`.
pub fn refine_lattice(
    p: &Parameters,
    lattice: &SeedLattice,
    o: &RootOptions,
) -> Vec<(i64, Result<RootRefinement, TranscendentError>)> {
    let inner = RootOptions { exec: Exec::Sequential, ..*o };
    o.exec.map(&lattice.seeds, |&(m, x)| (m, refine_root_with(p, x, lattice.kind, &inner)))
}
