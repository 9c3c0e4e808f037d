use pv5_special::{BranchedLog, C2Matrix, Complex64};

use crate::{domain_check, gamma_quad, Parameters, SeriesError};

/// Which printed terms to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Truncation {
    /// Constants and the first power of each exponential.
    L0,
    /// Adds the `x^-1` corrections, the `x^-2` term of `f0` and the quadratic
    /// exponential terms.
    #[default]
    L1,
}

impl Truncation {
    pub fn order(self) -> u32 {
        match self {
            Truncation::L0 => 0,
            Truncation::L1 => 1,
        }
    }
}

/// Special members of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegenerateKind {
    /// `σ = -2θx - θ∞`: a series in `e^x x^{σ0-1}` only, parametrised by `(c0, cx)`.
    TwoParam,
    /// Additionally `cx = 0`: a pure power series, parametrised by `c0`.
    OneParam,
}

/// A residue pair with its components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABPair {
    pub a0: C2Matrix,
    pub ax: C2Matrix,
    pub f0: Complex64,
    pub fplus: Complex64,
    pub fminus: Complex64,
    pub g0: Complex64,
    pub gplus: Complex64,
    pub gminus: Complex64,
    pub x: Complex64,
    pub truncation_order: u32,
}

impl ABPair {
    fn assemble(x: Complex64, order: u32, f: [Complex64; 3], g_pm: [Complex64; 2], thetainf: Complex64) -> Self {
        let [f0, fplus, fminus] = f;
        let g0 = -thetainf / 2.0 - f0;
        let [gplus, gminus] = g_pm;
        Self {
            a0: C2Matrix::traceless(f0, fplus, fminus),
            ax: C2Matrix::traceless(g0, gplus, gminus),
            f0,
            fplus,
            fminus,
            g0,
            gplus,
            gminus,
            x,
            truncation_order: order,
        }
    }

    /// `(|det A0 + θ0²/4|, |det Ax + θx²/4|)`.
    pub fn det_defect(&self, p: &Parameters) -> (f64, f64) {
        (
            (self.a0.det() + p.theta0 * p.theta0 / 4.0).norm(),
            (self.ax.det() + p.thetax * p.thetax / 4.0).norm(),
        )
    }
}

/// Series evaluation after checking that `x` lies in the admissible domain
/// (default `δ`, `x∞` and `ε = 0.1`).
pub fn series_a_pair(p: &Parameters, x: Complex64, order: Truncation) -> Result<ABPair, SeriesError> {
    if !domain_check(p, x, 0.1) {
        return Err(SeriesError::OutsideDomain { x });
    }
    series_a_pair_unchecked(p, x, order)
}

/// Series evaluation without the domain test. Powers of `x` use the argument
/// closest to `π/2`.
pub fn series_a_pair_unchecked(p: &Parameters, x: Complex64, order: Truncation) -> Result<ABPair, SeriesError> {
    let g = gamma_quad(p)?;
    let (s, ti) = (p.sigma, p.thetainf);
    let lx = BranchedLog::upper(x);
    let xp = |a: Complex64| lx.pow(a);
    let ex = x.exp();
    let e = ex * xp(s - 1.0);
    let f = (-x).exp() * xp(-s - 1.0);
    let (p0, px) = (g.p0(), g.px());
    let s2 = s * s - ti * ti;
    let zero = Complex64::new(0.0, 0.0);
    let (ix, q) = match order {
        Truncation::L0 => (zero, 0.0),
        Truncation::L1 => (x.inv(), 1.0),
    };

    let mut f0 = (s - ti) / 4.0
        + g.g0m * g.gxp * (1.0 - (s - 1.0 + 2.0 * (p0 + px) - s2 / 2.0) * ix) * e
        + g.g0p * g.gxm * (1.0 - (s + 1.0 - 2.0 * (p0 + px) + s2 / 2.0) * ix) * f;
    if order == Truncation::L1 {
        f0 -= ((s + ti) * p0 + (s - ti) * px) * ix * ix / 2.0;
    }
    let fplus = (g.g0p * (1.0 + (2.0 * px - s2 / 4.0) * ix) - g.gxp * ((s - ti) / 2.0) * e
        - q * g.g0m * g.gxp * g.gxp * e * e
        + q * 2.0 * g.g0p * g.g0p * g.gxm * f * ix)
        * xp(-(s + ti) / 2.0);
    let gplus = (g.gxp * (1.0 - (2.0 * p0 - s2 / 4.0) * ix) + q * 2.0 * g.g0m * g.gxp * g.gxp * e * ix
        - g.g0p * ((s + ti) / 2.0) * f
        - q * g.g0p * g.g0p * g.gxm * f * f)
        * ex
        * xp((s - ti) / 2.0);
    let fminus = (g.g0m * (1.0 - (2.0 * px - s2 / 4.0) * ix) + q * 2.0 * g.g0m * g.g0m * g.gxp * e * ix
        - g.gxm * ((s - ti) / 2.0) * f
        - q * g.g0p * g.gxm * g.gxm * f * f)
        * xp((s + ti) / 2.0);
    let gminus = (g.gxm * (1.0 + (2.0 * p0 - s2 / 4.0) * ix) - g.g0m * ((s + ti) / 2.0) * e
        - q * g.g0m * g.g0m * g.gxp * e * e
        + q * 2.0 * g.g0p * g.gxm * g.gxm * f * ix)
        * (-x).exp()
        * xp(-(s - ti) / 2.0);

    Ok(ABPair::assemble(x, order.order(), [f0, fplus, fminus], [gplus, gminus], ti))
}

/// The degenerate members at `σ = σ0`, printed terms only.
///
/// `OneParam` ignores `p.cx` and `p.sigma`; `TwoParam` ignores `p.sigma`.
pub fn series_a_pair_degenerate(p: &Parameters, x: Complex64, kind: DegenerateKind) -> Result<ABPair, SeriesError> {
    let zero = Complex64::new(0.0, 0.0);
    if p.c0 == zero {
        return Err(SeriesError::ZeroConstant("c0"));
    }
    let (t0, tx, ti) = (p.theta0, p.thetax, p.thetainf);
    let lx = BranchedLog::upper(x);
    let xp = |a: Complex64| lx.pow(a);
    let ix = x.inv();
    let a = t0 - tx - ti;
    let b = t0 + tx + ti;
    match kind {
        DegenerateKind::OneParam => {
            let f0 = -(tx + ti) / 2.0 + tx * (t0 * t0 - (tx + ti) * (tx + ti)) * ix * ix / 4.0;
            let fplus = xp(tx) * p.c0 * a / 2.0;
            let gplus = xp(tx - 1.0) * p.c0 * a * tx / 2.0;
            let fminus = xp(-tx) * b / (2.0 * p.c0);
            let gminus = xp(-tx - 1.0) * b * tx / (2.0 * p.c0);
            Ok(ABPair::assemble(x, 1, [f0, fplus, fminus], [gplus, gminus], ti))
        }
        DegenerateKind::TwoParam => {
            if tx == zero {
                return Err(SeriesError::Degenerate("the two-parameter family needs θx ≠ 0"));
            }
            let s0 = p.sigma0();
            let g0p = p.c0 * a / 2.0;
            let g0m = b / (2.0 * p.c0);
            let gxp = p.cx * tx;
            let e0 = x.exp() * xp(s0 - 1.0);
            let f0c = (-x).exp() * xp(-s0 - 1.0);
            let f0 = -(tx + ti) / 2.0 + tx * g0p * g0m * ix * ix + g0m * gxp * e0;
            let fplus = xp(tx) * (g0p + gxp * (tx + ti) * e0 - g0m * gxp * gxp * e0 * e0);
            let gplus = x.exp() * xp(-tx - ti) * (gxp + 2.0 * g0m * gxp * gxp * e0 * ix + g0p * tx * f0c);
            let fminus = xp(-tx) * (g0m + 2.0 * g0m * g0m * gxp * e0 * ix);
            let gminus = (-x).exp() * xp(tx + ti) * (g0m * tx * e0 - g0m * g0m * gxp * e0 * e0);
            Ok(ABPair::assemble(x, 1, [f0, fplus, fminus], [gplus, gminus], ti))
        }
    }
}

/// How the Schlesinger residual is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ResidualForm {
    /// `max(‖x A0' - [Ax, A0]‖, ‖x Ax' - [A0, Ax] - x[J, Ax]/2‖)`.
    #[default]
    Scaled,
    /// The same divided by `|x|`, i.e. the residual of `A' = rhs(x, A)`.
    Flow,
}

/// Finite-difference residual of the Schlesinger system at `x`, using a
/// centred difference with absolute step `h` along the ray through `x`.
///
/// Every omitted `e^{±x}` term is multiplied by `x` in the [`ResidualForm::Scaled`]
/// residual, which therefore decays one power of `|x|` slower than the
/// [`ResidualForm::Flow`] one.
pub fn schlesinger_residual(
    p: &Parameters,
    x: Complex64,
    order: Truncation,
    h: f64,
    form: ResidualForm,
) -> Result<f64, SeriesError> {
    let dir = x / x.norm();
    let plus = series_a_pair_unchecked(p, x + dir * h, order)?;
    let minus = series_a_pair_unchecked(p, x - dir * h, order)?;
    let mid = series_a_pair_unchecked(p, x, order)?;
    let inv_step = (dir * (2.0 * h)).inv();
    let ix = x.inv();
    let da0 = (plus.a0 - minus.a0).scale(inv_step);
    let dax = (plus.ax - minus.ax).scale(inv_step);
    let r0 = da0 - mid.ax.commutator(&mid.a0).scale(ix);
    let rx = dax - mid.a0.commutator(&mid.ax).scale(ix) - C2Matrix::J.commutator(&mid.ax) * 0.5;
    let r = r0.max_abs().max(rx.max_abs());
    Ok(match form {
        ResidualForm::Scaled => r * x.norm(),
        ResidualForm::Flow => r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pv5_special::c64;

    fn p1() -> Parameters {
        Parameters::real(0.21, 0.16, 0.11, c64(0.24, 0.05), c64(1.0, 0.0), c64(0.7, 0.2))
    }

    #[test]
    fn condition_b_is_exact() {
        for order in [Truncation::L0, Truncation::L1] {
            let s = series_a_pair(&p1(), c64(0.0, 150.0), order).unwrap();
            assert_eq!(s.g0, -p1().thetainf / 2.0 - s.f0);
            assert!(((s.a0 + s.ax).a11 + p1().thetainf / 2.0).norm() < 1e-16);
            assert_eq!(s.a0.trace(), c64(0.0, 0.0));
        }
    }

    #[test]
    fn leading_f0_far_out() {
        let p = Parameters::real(0.3, 0.2, 0.1, c64(0.2, 0.0), c64(1.0, 0.0), c64(1.0, 0.0));
        let s = series_a_pair(&p, c64(0.0, 1e4), Truncation::L1).unwrap();
        assert!((s.f0 - 0.025).norm() < 1e-4);
    }

    #[test]
    fn outside_domain_is_an_error() {
        assert!(matches!(
            series_a_pair(&p1(), c64(100.0, 0.0), Truncation::L1),
            Err(SeriesError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn one_param_leading_fminus() {
        let p = Parameters::real(0.3, 0.2, 0.1, c64(0.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0));
        let x = c64(0.0, 300.0);
        let s = series_a_pair_degenerate(&p, x, DegenerateKind::OneParam).unwrap();
        let lead = BranchedLog::upper(x).pow(p.thetax) * s.fminus;
        assert!((lead - 0.6 / 4.0).norm() < 1e-14);
        let q = Parameters::real(0.3, 0.2, -0.5, c64(0.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0));
        let s = series_a_pair_degenerate(&q, x, DegenerateKind::OneParam).unwrap();
        assert_eq!(s.fminus, c64(0.0, 0.0));
        assert_eq!(s.gminus, c64(0.0, 0.0));
    }

    #[test]
    fn two_param_needs_thetax() {
        let p = Parameters::real(0.3, 0.0, 0.1, c64(0.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0));
        assert!(series_a_pair_degenerate(&p, c64(0.0, 50.0), DegenerateKind::TwoParam).is_err());
        let s = series_a_pair_degenerate(&p.with_sigma(p.sigma0()), c64(0.0, 50.0), DegenerateKind::OneParam).unwrap();
        assert!((s.f0 + 0.05).norm() < 1e-14);
    }
}
