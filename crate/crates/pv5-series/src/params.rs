use pv5_special::{C2Matrix, Complex64};

use crate::SeriesError;

/// Formal exponents `(θ0, θx, θ∞)` together with the integration constants
/// `(c0, cx, σ)` of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    pub theta0: Complex64,
    pub thetax: Complex64,
    pub thetainf: Complex64,
    pub c0: Complex64,
    pub cx: Complex64,
    pub sigma: Complex64,
}

impl Parameters {
    pub fn new(
        theta0: Complex64,
        thetax: Complex64,
        thetainf: Complex64,
        sigma: Complex64,
        c0: Complex64,
        cx: Complex64,
    ) -> Self {
        Self { theta0, thetax, thetainf, c0, cx, sigma }
    }

    /// All-real exponents, a convenience for the common case.
    pub fn real(theta0: f64, thetax: f64, thetainf: f64, sigma: Complex64, c0: Complex64, cx: Complex64) -> Self {
        Self::new(theta0.into(), thetax.into(), thetainf.into(), sigma, c0, cx)
    }

    /// `c = cx/c0`, the constant that survives in the Painlevé function `y`.
    pub fn c(&self) -> Complex64 {
        self.cx / self.c0
    }

    /// `c' = c0/cx`.
    pub fn c_prime(&self) -> Complex64 {
        self.c0 / self.cx
    }

    /// `σ0 = -2θx - θ∞`, where `γx- = 0`.
    pub fn sigma0(&self) -> Complex64 {
        -2.0 * self.thetax - self.thetainf
    }

    /// `σ0' = 2θ0 + θ∞`, where `γ0- = 0`.
    pub fn sigma0_prime(&self) -> Complex64 {
        2.0 * self.theta0 + self.thetainf
    }

    pub fn with_sigma(mut self, sigma: Complex64) -> Self {
        self.sigma = sigma;
        self
    }
}

/// The four constants `γ0±`, `γx±` that seed every coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaQuad {
    pub g0p: Complex64,
    pub g0m: Complex64,
    pub gxp: Complex64,
    pub gxm: Complex64,
}

impl GammaQuad {
    pub fn p0(&self) -> Complex64 {
        self.g0p * self.g0m
    }

    pub fn px(&self) -> Complex64 {
        self.gxp * self.gxm
    }
}

pub fn gamma_quad(p: &Parameters) -> Result<GammaQuad, SeriesError> {
    if p.c0 == Complex64::new(0.0, 0.0) {
        return Err(SeriesError::ZeroConstant("c0"));
    }
    if p.cx == Complex64::new(0.0, 0.0) {
        return Err(SeriesError::ZeroConstant("cx"));
    }
    let (s, t0, tx, ti) = (p.sigma, p.theta0, p.thetax, p.thetainf);
    Ok(GammaQuad {
        g0p: p.c0 * (s + 2.0 * t0 - ti) / 4.0,
        g0m: (-s + 2.0 * t0 + ti) / (4.0 * p.c0),
        gxp: p.cx * (-s + 2.0 * tx - ti) / 4.0,
        gxm: (s + 2.0 * tx + ti) / (4.0 * p.cx),
    })
}

/// Leading residue matrices `Λ0`, `Λx` obtained by dropping every
/// `x`-dependent term of the series.
pub fn leading_lambda_matrices(p: &Parameters) -> Result<(C2Matrix, C2Matrix), SeriesError> {
    let g = gamma_quad(p)?;
    let l0 = C2Matrix::traceless((p.sigma - p.thetainf) / 4.0, g.g0p, g.g0m);
    let lx = C2Matrix::traceless(-(p.sigma + p.thetainf) / 4.0, g.gxp, g.gxm);
    Ok((l0, lx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pv5_special::{c64, eigvals2};

    #[test]
    fn gamma_quad_direct_substitution() {
        let p = Parameters::real(0.0, 0.0, 0.0, c64(0.4, 0.0), c64(1.0, 0.0), c64(1.0, 0.0));
        let g = gamma_quad(&p).unwrap();
        let expect = [0.1, -0.1, -0.1, 0.1];
        for (got, e) in [g.g0p, g.g0m, g.gxp, g.gxm].iter().zip(expect) {
            assert!((got - e).norm() < 1e-15);
        }
    }

    #[test]
    fn sigma0_kills_gxm() {
        let p = Parameters::real(0.3, 0.2, 0.1, c64(0.0, 0.0), c64(1.5, 0.0), c64(0.3, 0.1));
        let g = gamma_quad(&p.with_sigma(p.sigma0())).unwrap();
        assert!(g.gxm.norm() < 1e-16);
    }

    #[test]
    fn zero_constants_are_rejected() {
        let p = Parameters::real(0.3, 0.2, 0.1, c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0));
        assert_eq!(gamma_quad(&p), Err(SeriesError::ZeroConstant("c0")));
    }

    #[test]
    fn leading_matrices() {
        let p = Parameters::real(0.2, 0.1, 0.1, c64(0.3, 0.0), c64(1.0, 0.0), c64(1.0, 0.0));
        let (l0, lx) = leading_lambda_matrices(&p).unwrap();
        assert!((l0.a11 - 0.05).norm() < 1e-15);
        assert!((l0.a12 - 0.15).norm() < 1e-15);
        assert!(((l0 + lx).a11 + 0.05).norm() < 1e-15);
        let (a, b) = eigvals2(&l0);
        assert!((a - 0.1).norm() < 1e-14 && (b + 0.1).norm() < 1e-14);
    }
}
