use std::f64::consts::FRAC_PI_2;

use pv5_special::{BranchedLog, Complex64};

use crate::Parameters;

/// Shape of the admissible sector-like domain around the positive imaginary
/// axis: `|arg x - π/2| < π/2 - δ` and `|x| > x∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainConfig {
    pub delta: f64,
    pub x_inf: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { delta: 0.1, x_inf: 20.0 }
    }
}

/// Membership test with the default [`DomainConfig`].
pub fn domain_check(p: &Parameters, x: Complex64, eps: f64) -> bool {
    domain_check_with(p, x, eps, &DomainConfig::default())
}

/// True when both `|e^x x^{σ-1}|` and `|e^{-x} x^{-σ-1}|` are below `eps`,
/// written as the equivalent strip condition on `Re x`.
pub fn domain_check_with(p: &Parameters, x: Complex64, eps: f64, cfg: &DomainConfig) -> bool {
    if x.norm() <= cfg.x_inf {
        return false;
    }
    let arg = BranchedLog::upper(x).tracked_arg;
    if (arg - FRAC_PI_2).abs() >= FRAC_PI_2 - cfg.delta {
        return false;
    }
    let ln_abs = x.norm().ln();
    let ln_inv_eps = (1.0 / eps).ln();
    let shift = p.sigma.im * arg;
    let lower = -(1.0 + p.sigma.re) * ln_abs + shift + ln_inv_eps;
    let upper = (1.0 - p.sigma.re) * ln_abs + shift - ln_inv_eps;
    lower < x.re && x.re < upper
}
