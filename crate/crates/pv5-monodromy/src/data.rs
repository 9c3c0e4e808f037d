use std::f64::consts::PI;

use pv5_special::{c64, C2Matrix, Complex64};

use crate::MonodromyError;

/// Monodromy about `0` and `x`, the monodromy at infinity and the Stokes data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyData {
    pub m0: C2Matrix,
    pub mx: C2Matrix,
    pub minf: C2Matrix,
    pub s1: Complex64,
    pub s2: Complex64,
    /// `I + s1·Δ-`.
    pub s1_matrix: C2Matrix,
    /// `I + s2·Δ+`.
    pub s2_matrix: C2Matrix,
}

/// Absolute violations of the identities every monodromy datum satisfies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralDefects {
    pub det_m0: f64,
    pub det_mx: f64,
    pub trace_m0: f64,
    pub trace_mx: f64,
    /// `‖M∞ Mx M0 - I‖`.
    pub product: f64,
    /// `|tr(Mx M0) - 2cos πθ∞ - e^{-πiθ∞} s1 s2|`.
    pub stokes_trace: f64,
    /// `|(Mx M0)11 - e^{-πiθ∞}|`.
    pub corner: f64,
}

impl StructuralDefects {
    pub fn within(&self, det: f64, rest: f64) -> bool {
        self.det_m0 <= det
            && self.det_mx <= det
            && self.trace_m0 <= rest
            && self.trace_mx <= rest
            && self.product <= rest
            && self.stokes_trace <= rest
    }
}

fn e_pi_i(a: Complex64) -> Complex64 {
    (c64(0.0, PI) * a).exp()
}

fn two_cos_pi(a: Complex64) -> Complex64 {
    (a * PI).cos() * 2.0
}

impl MonodromyData {
    /// Complete `(M0, Mx)` to the full datum; the Stokes multipliers are read
    /// off the off-diagonal entries of `Mx M0`.
    pub fn from_pair(m0: C2Matrix, mx: C2Matrix, thetainf: Complex64) -> Self {
        let p = mx * m0;
        let k = -e_pi_i(thetainf);
        let s1 = k * p.a21;
        let s2 = k * p.a12;
        Self {
            m0,
            mx,
            minf: m0.inv_sl2() * mx.inv_sl2(),
            s1,
            s2,
            s1_matrix: C2Matrix::I + C2Matrix::DELTA_MINUS * s1,
            s2_matrix: C2Matrix::I + C2Matrix::DELTA_PLUS * s2,
        }
    }

    pub fn defects(&self, theta0: Complex64, thetax: Complex64, thetainf: Complex64) -> StructuralDefects {
        let one = c64(1.0, 0.0);
        let p = self.mx * self.m0;
        StructuralDefects {
            det_m0: (self.m0.det() - one).norm(),
            det_mx: (self.mx.det() - one).norm(),
            trace_m0: (self.m0.trace() - two_cos_pi(theta0)).norm(),
            trace_mx: (self.mx.trace() - two_cos_pi(thetax)).norm(),
            product: (self.minf * self.mx * self.m0 - C2Matrix::I).max_abs(),
            stokes_trace: self.stokes_trace_defect(thetainf),
            corner: (p.a11 - e_pi_i(-thetainf)).norm(),
        }
    }

    pub fn stokes_trace_defect(&self, thetainf: Complex64) -> f64 {
        let p = self.mx * self.m0;
        (p.trace() - two_cos_pi(thetainf) - e_pi_i(-thetainf) * self.s1 * self.s2).norm()
    }

    /// Largest entrywise difference in `M0`, `Mx`, `s1`, `s2`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.m0 - other.m0)
            .max_abs()
            .max((self.mx - other.mx).max_abs())
            .max((self.s1 - other.s1).norm())
            .max((self.s2 - other.s2).norm())
    }
}

/// Move `steps` (even) units along the braid orbit: each `+2` replaces
/// `(M0, Mx)` by `(Mx M0 Mx⁻¹, Mx M0 Mx M0⁻¹ Mx⁻¹)` and each `-2` applies the inverse map.
pub fn braid_shift(md: &MonodromyData, steps: i64, thetainf: Complex64) -> Result<MonodromyData, MonodromyError> {
    if steps % 2 != 0 {
        return Err(MonodromyError::OddBraidStep(steps));
    }
    let (mut m0, mut mx) = (md.m0, md.mx);
    for _ in 0..(steps / 2).abs() {
        let (i0, ix) = (m0.inv_sl2(), mx.inv_sl2());
        (m0, mx) = if steps > 0 {
            (mx * m0 * ix, mx * m0 * mx * i0 * ix)
        } else {
            (i0 * ix * m0 * mx * m0, i0 * mx * m0)
        };
    }
    Ok(MonodromyData::from_pair(m0, mx, thetainf))
}
