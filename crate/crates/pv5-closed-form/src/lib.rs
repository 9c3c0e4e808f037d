//! Closed-form monodromy data for the series family `(c0, cx, σ)`.
//!
//! Two independent evaluations are provided. The entrywise one reads
//! `(M0)11`, `(M0)21`, `(Mx)11`, `(Mx)12`, `s1`, `s2` off reciprocal-Gamma
//! products and completes the matrices from `tr` and `det`. The structural one
//! conjugates the local exponents by the connection matrices. Only the
//! structural one covers integer `θ0`, `θx`.

mod factors;

pub use factors::{
    closed_form_factors, integer_case, s_star, s_star_star, v_generic, v_integer, ConnectionFactors, DeltaStar,
    IntegerCase,
};

use std::f64::consts::PI;

use factors::e_pi_i;
use pv5_monodromy::MonodromyData;
use pv5_series::Parameters;
use pv5_special::{c64, rgamma, C2Matrix, Complex64};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("integration constant {0} must be nonzero")]
    ZeroConstant(&'static str),
    #[error("resonant parameters: {0}")]
    Resonance(&'static str),
    #[error("entrywise and structural constructions differ by {gap:e}")]
    Inconsistent { gap: f64, entrywise: Box<MonodromyData>, structural: Box<MonodromyData> },
}

/// Both constructions, when available.
#[derive(Debug, Clone, PartialEq)]
pub struct Constructions {
    /// `None` at integer `θ` or when a completion divisor vanishes.
    pub entrywise: Option<MonodromyData>,
    pub structural: MonodromyData,
    /// `|Q22 - N22|`, the redundant entry of the Stokes relation.
    pub stokes_check: f64,
}

impl Constructions {
    pub fn gap(&self) -> Option<f64> {
        self.entrywise.as_ref().map(|e| e.distance(&self.structural).max((e.minf - self.structural.minf).max_abs()))
    }
}

/// The six entries printed in closed form, for non-integer `θ0`, `θx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryFormulas {
    pub m0_11: Complex64,
    pub m0_21: Complex64,
    pub mx_11: Complex64,
    pub mx_12: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
}

pub fn entry_formulas(p: &Parameters) -> Result<EntryFormulas, ClosedFormError> {
    if p.c0.norm() == 0.0 {
        return Err(ClosedFormError::ZeroConstant("c0"));
    }
    if p.cx.norm() == 0.0 {
        return Err(ClosedFormError::ZeroConstant("cx"));
    }
    let (s, t0, tx, ti) = (p.sigma, p.theta0, p.thetax, p.thetainf);
    let one = c64(1.0, 0.0);
    let tpi = c64(0.0, 2.0 * PI);
    let a = tpi / p.c0 * rgamma(one - (s + 2.0 * t0 - ti) / 4.0) * rgamma(-(s - 2.0 * t0 - ti) / 4.0);
    let b = tpi * p.cx * rgamma(one - (s + 2.0 * tx + ti) / 4.0) * rgamma(-(s - 2.0 * tx + ti) / 4.0);
    let half = e_pi_i((s + ti) / 2.0);
    Ok(EntryFormulas {
        m0_11: e_pi_i((s - ti) / 2.0) * (one - a * b),
        m0_21: e_pi_i(-ti) * a,
        mx_11: e_pi_i(-(s + ti) / 2.0),
        mx_12: b,
        s1: -half * a - tpi / p.cx * rgamma(one + (s - 2.0 * tx + ti) / 4.0) * rgamma((s + 2.0 * tx + ti) / 4.0),
        s2: -tpi * e_pi_i(ti) * p.c0 * rgamma(one + (s - 2.0 * t0 - ti) / 4.0) * rgamma((s + 2.0 * t0 - ti) / 4.0)
            - half * b,
    })
}

fn two_cos_pi(a: Complex64) -> Complex64 {
    (a * PI).cos() * 2.0
}

fn entrywise(p: &Parameters, e: &EntryFormulas) -> Option<MonodromyData> {
    const TINY: f64 = 1e-300;
    if e.m0_21.norm() < TINY || e.mx_12.norm() < TINY {
        return None;
    }
    let m0_22 = two_cos_pi(p.theta0) - e.m0_11;
    let m0 = C2Matrix::new(e.m0_11, (e.m0_11 * m0_22 - 1.0) / e.m0_21, e.m0_21, m0_22);
    let mx_22 = two_cos_pi(p.thetax) - e.mx_11;
    let mx = C2Matrix::new(e.mx_11, e.mx_12, (e.mx_11 * mx_22 - 1.0) / e.mx_12, mx_22);
    let mut md = MonodromyData::from_pair(m0, mx, p.thetainf);
    md.s1 = e.s1;
    md.s2 = e.s2;
    md.s1_matrix = C2Matrix::I + C2Matrix::DELTA_MINUS * e.s1;
    md.s2_matrix = C2Matrix::I + C2Matrix::DELTA_PLUS * e.s2;
    Some(md)
}

fn structural(p: &Parameters, f: &ConnectionFactors) -> Result<(MonodromyData, f64), ClosedFormError> {
    let singular = |_| ClosedFormError::Resonance("connection matrix is singular");
    let cx_inv = f.cx.inv().map_err(singular)?;
    let mx = cx_inv * f.ex * f.cx;
    let q = C2Matrix::exp_j(c64(0.0, PI) * p.thetainf) * f.c01.inv().map_err(singular)? * f.e0 * f.c01;
    let n = mx.inv_sl2();
    if n.a22.norm() < 1e-300 {
        return Err(ClosedFormError::Resonance("(Mx^-1)22 vanishes; Stokes data not determined"));
    }
    let s1 = (n.a21 - q.a21) / n.a22;
    let s2 = (n.a12 - q.a12) / n.a22;
    let s2m = C2Matrix::I + C2Matrix::DELTA_PLUS * s2;
    let s2m_inv = C2Matrix::I - C2Matrix::DELTA_PLUS * s2;
    let m0 = s2m * f.c02.inv().map_err(singular)? * f.e0 * f.c02 * s2m_inv;
    let mut md = MonodromyData::from_pair(m0, mx, p.thetainf);
    md.s1 = s1;
    md.s2 = s2;
    md.s1_matrix = C2Matrix::I + C2Matrix::DELTA_MINUS * s1;
    md.s2_matrix = s2m;
    Ok((md, (q.a22 - n.a22).norm()))
}

pub fn closed_form_constructions(p: &Parameters) -> Result<Constructions, ClosedFormError> {
    let f = closed_form_factors(p)?;
    let (structural, stokes_check) = structural(p, &f)?;
    let entrywise = if f.integer_case_0.is_none() && f.integer_case_x.is_none() {
        entrywise(p, &entry_formulas(p)?)
    } else {
        None
    };
    Ok(Constructions { entrywise, structural, stokes_check })
}

/// Relative tolerance for the agreement of the two constructions.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// The monodromy data of the family, cross-checked between both constructions
/// whenever the entrywise one exists.
pub fn closed_form_monodromy(p: &Parameters) -> Result<MonodromyData, ClosedFormError> {
    let c = closed_form_constructions(p)?;
    if let (Some(gap), Some(e)) = (c.gap(), c.entrywise.as_ref()) {
        let scale = 1f64.max(c.structural.m0.max_abs()).max(c.structural.mx.max_abs());
        if !(gap <= CONSISTENCY_TOL * scale) {
            return Err(ClosedFormError::Inconsistent {
                gap,
                entrywise: Box::new(*e),
                structural: Box::new(c.structural),
            });
        }
    }
    Ok(c.structural)
}
