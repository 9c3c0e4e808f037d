use pv5_series::{domain_check, Parameters, SeriesError};
use pv5_special::{BranchedLog, Complex64};

use crate::TranscendentError;

/// Resonant exponents closer than this are rejected.
const RESONANCE_MARGIN: f64 = 1e-10;

/// First coefficients of `y = c e^x x^σ (1 + a1 e^x x^{σ-1} + b1 e^{-x} x^{-σ-1} + ...)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YCoefficients {
    pub c: Complex64,
    pub a1: Complex64,
    pub b1: Complex64,
}

/// `a1 = c(-σ + θ0 + θx)/2`, `b1 = c^{-1}(σ + θ0 + θx)/2` with `c = cx/c0`.
pub fn series_coefficients(p: &Parameters) -> Result<YCoefficients, TranscendentError> {
    if p.c0.norm() == 0.0 {
        return Err(SeriesError::ZeroConstant("c0").into());
    }
    if p.cx.norm() == 0.0 {
        return Err(SeriesError::ZeroConstant("cx").into());
    }
    if (p.sigma + 2.0 * p.theta0 - p.thetainf).norm() < RESONANCE_MARGIN {
        return Err(TranscendentError::Resonance("σ = -2θ0 + θ∞"));
    }
    if (-p.sigma + 2.0 * p.thetax - p.thetainf).norm() < RESONANCE_MARGIN {
        return Err(TranscendentError::Resonance("σ = 2θx - θ∞"));
    }
    let c = p.c();
    let s = p.theta0 + p.thetax;
    Ok(YCoefficients { c, a1: c * (s - p.sigma) / 2.0, b1: (p.sigma + s) / (2.0 * c) })
}

/// The small quantities `E = e^x x^{σ-1}` and `F = e^{-x} x^{-σ-1}` on the upper sheet.
fn small_pair(sigma: Complex64, x: Complex64) -> (Complex64, Complex64, BranchedLog) {
    let lx = BranchedLog::upper(x);
    (x.exp() * lx.pow(sigma - 1.0), (-x).exp() * lx.pow(-sigma - 1.0), lx)
}

/// Truncated two-parameter series for `y`. The omitted part is of relative
/// size `O(x^{-1})` in the leading factor and `O(E^2, F^2, EF)` in the bracket.
pub fn y_series(p: &Parameters, x: Complex64) -> Result<Complex64, TranscendentError> {
    let k = series_coefficients(p)?;
    if !domain_check(p, x, 0.1) {
        return Err(SeriesError::OutsideDomain { x }.into());
    }
    let (e, f, lx) = small_pair(p.sigma, x);
    Ok(k.c * x.exp() * lx.pow(p.sigma) * (1.0 + k.a1 * e + k.b1 * f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateBranch {
    /// `σ = -2θx - θ∞`, parameter `c = cx/c0`.
    Plus,
    /// `σ = 2θ0 + θ∞`, parameter `c' = c0/cx`; the series is for `1/y`.
    Minus,
}

/// Leading terms of the one-parameter families
/// `y+ = (θ0-θx-θ∞)/(2x) + c e^x x^{σ0}` and `1/y- = (θ0-θx+θ∞)/(2x) + c' e^{-x} x^{-σ0'}`.
pub fn y_degenerate_series(p: &Parameters, x: Complex64, branch: DegenerateBranch) -> Result<Complex64, TranscendentError> {
    let lx = BranchedLog::upper(x);
    match branch {
        DegenerateBranch::Plus => {
            let k = p.theta0 - p.thetax - p.thetainf;
            if p.thetax.norm() == 0.0 || k.norm() == 0.0 {
                return Err(TranscendentError::Degenerate("θx(θ0 - θx - θ∞) = 0"));
            }
            if (p.sigma - p.sigma0()).norm() > RESONANCE_MARGIN {
                return Err(TranscendentError::Degenerate("σ differs from -2θx - θ∞"));
            }
            if p.c0.norm() == 0.0 {
                return Err(SeriesError::ZeroConstant("c0").into());
            }
            Ok(k / (2.0 * x) + p.c() * x.exp() * lx.pow(p.sigma0()))
        }
        DegenerateBranch::Minus => {
            let k = p.theta0 - p.thetax + p.thetainf;
            if p.theta0.norm() == 0.0 || k.norm() == 0.0 {
                return Err(TranscendentError::Degenerate("θ0(θ0 - θx + θ∞) = 0"));
            }
            if (p.sigma - p.sigma0_prime()).norm() > RESONANCE_MARGIN {
                return Err(TranscendentError::Degenerate("σ differs from 2θ0 + θ∞"));
            }
            if p.cx.norm() == 0.0 {
                return Err(SeriesError::ZeroConstant("cx").into());
            }
            let inv = k / (2.0 * x) + p.c_prime() * (-x).exp() * lx.pow(-p.sigma0_prime());
            if inv.norm() == 0.0 {
                return Err(TranscendentError::DivisionByZero("1/y-"));
            }
            Ok(1.0 / inv)
        }
    }
}

/// Least-squares estimate of `a1`, `b1` from samples of `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesFit {
    pub a1: Complex64,
    pub b1: Complex64,
    /// Constant part of `y/(c e^x x^σ) - 1`, the `O(x^{-1})` correction.
    pub offset: Complex64,
    pub rms_residual: f64,
}

/// Fit `y/(c e^x x^σ) - 1 ≈ k + a1 E + b1 F + a2 E^2 + b2 F^2` over the samples.
/// The extra columns soak up the next terms so they do not leak into `a1`, `b1`.
pub fn fit_series_coefficients(p: &Parameters, samples: &[(Complex64, Complex64)]) -> Result<SeriesFit, TranscendentError> {
    const COLS: usize = 5;
    if samples.len() < COLS {
        return Err(TranscendentError::Degenerate("at least five samples are needed"));
    }
    let c = series_coefficients(p)?.c;
    let mut cols: Vec<Vec<Complex64>> = vec![Vec::with_capacity(samples.len()); COLS];
    let mut rhs = Vec::with_capacity(samples.len());
    for &(x, y) in samples {
        let (e, f, lx) = small_pair(p.sigma, x);
        rhs.push(y / (c * x.exp() * lx.pow(p.sigma)) - 1.0);
        for (col, v) in cols.iter_mut().zip([Complex64::new(1.0, 0.0), e, f, e * e, f * f]) {
            col.push(v);
        }
    }
    let (coef, rms) = least_squares(cols, rhs).ok_or(TranscendentError::Degenerate("rank-deficient sample set"))?;
    Ok(SeriesFit { a1: coef[1], b1: coef[2], offset: coef[0], rms_residual: rms })
}

/// Column-scaled modified Gram–Schmidt solve of `min ||Σ coef_j cols_j - b||`.
fn least_squares(mut cols: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<(Vec<Complex64>, f64)> {
    let n = cols.len();
    let dot = |u: &[Complex64], v: &[Complex64]| u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<Complex64>();
    let mut r = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        for i in 0..j {
            let (qi, cj) = (cols[i].clone(), &mut cols[j]);
            let rij = dot(&qi, cj);
            for (a, q) in cj.iter_mut().zip(&qi) {
                *a -= rij * q;
            }
            r[i][j] = rij;
        }
        let norm = dot(&cols[j], &cols[j]).re.sqrt();
        if !(norm > 0.0) {
            return None;
        }
        for a in cols[j].iter_mut() {
            *a /= norm;
        }
        r[j][j] = norm.into();
    }
    let mut qtb = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        qtb[j] = dot(&cols[j], &b);
        for (a, q) in b.iter_mut().zip(&cols[j]) {
            *a -= qtb[j] * q;
        }
    }
    let rms = (b.iter().map(|v| v.norm_sqr()).sum::<f64>() / b.len() as f64).sqrt();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|k| r[i][k] * x[k]).sum();
        x[i] = (qtb[i] - s) / r[i][i];
    }
    Some((x, rms))
}
