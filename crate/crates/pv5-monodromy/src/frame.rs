use std::f64::consts::{FRAC_PI_2, TAU};

use pv5_flow::FlowState;
use pv5_special::{c64, C2Matrix, Complex64};

use crate::MonodromyError;

/// Which part of the formal expansion `Y = (I + Σ G_k λ^{-k}) e^{λJ/2} λ^{-θ∞J/2}`
/// is used to normalise the solution at the base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    /// Only the off-diagonal part of `G_1`.
    Leading,
    /// `G_0, ..., G_{terms-1}` from the full recursion.
    Recursive { terms: usize },
}

impl Default for FrameKind {
    fn default() -> Self {
        FrameKind::Recursive { terms: 24 }
    }
}

/// Smallest admissible normalisation radius for a state at `x`.
pub fn min_radius(x: Complex64) -> f64 {
    4.0 * (x.norm() + 10.0)
}

/// Coefficients `G_k` of the formal solution at infinity.
///
/// Matching powers of `λ` gives, for `n ≥ 1`,
/// `[J/2, G_n] = -(n-1) G_{n-1} - (θ∞/2) G_{n-1} J - Σ_{j=1..n} B_j G_{n-j}`
/// with `B_1 = A0 + Ax` and `B_j = Ax x^{j-1}`. The off-diagonal part of this
/// fixes the off-diagonal of `G_n`, and its diagonal at order `n + 1` fixes the
/// diagonal of `G_n`.
pub fn formal_coefficients(s: &FlowState, terms: usize) -> Vec<C2Matrix> {
    let ti = s.params.thetainf;
    let mut b = vec![C2Matrix::ZERO, s.a0 + s.ax];
    let mut xp = c64(1.0, 0.0);
    for _ in 2..=terms + 1 {
        xp *= s.x;
        b.push(s.ax.scale(xp));
    }
    let mut g = vec![C2Matrix::I];
    for n in 1..=terms {
        if n >= 2 {
            let mut acc = b[1].off_diagonal() * g[n - 1].off_diagonal();
            for j in 2..=n {
                acc = acc + b[j] * g[n - j];
            }
            let k = (n - 1) as f64;
            g[n - 1].a11 = -acc.a11 / k;
            g[n - 1].a22 = -acc.a22 / k;
        }
        let mut r = g[n - 1] * (-((n - 1) as f64)) - (g[n - 1] * C2Matrix::J).scale(ti / 2.0);
        for j in 1..=n {
            r = r - b[j] * g[n - j];
        }
        g.push(C2Matrix::new(c64(0.0, 0.0), r.a12, -r.a21, c64(0.0, 0.0)));
    }
    g.truncate(terms);
    g
}

/// The normalised fundamental solution evaluated at `λ0 = i·radius`, with
/// `arg λ0 = π/2`.
pub fn normalized_frame(s: &FlowState, radius: f64, kind: FrameKind) -> Result<C2Matrix, MonodromyError> {
    let need = min_radius(s.x);
    if radius < need {
        return Err(MonodromyError::RadiusTooSmall { radius, need });
    }
    Ok(formal_solution(s, c64(0.0, radius), kind))
}

/// The truncated formal solution at any `λ`, with `arg λ` taken in `(-π/2, 3π/2]`.
pub fn formal_solution(s: &FlowState, lam: Complex64, kind: FrameKind) -> C2Matrix {
    let inv = lam.inv();
    let series = match kind {
        FrameKind::Leading => {
            let b = s.a0 + s.ax;
            C2Matrix::I + C2Matrix::new(c64(0.0, 0.0), -b.a12, b.a21, c64(0.0, 0.0)).scale(inv)
        }
        FrameKind::Recursive { terms } => {
            let g = formal_coefficients(s, terms.max(1));
            let mut acc = C2Matrix::ZERO;
            for gk in g.iter().rev() {
                acc = acc.scale(inv) + *gk;
            }
            acc
        }
    };
    let mut arg = lam.arg();
    if arg <= -FRAC_PI_2 {
        arg += TAU;
    }
    let log_lam = c64(lam.norm().ln(), arg);
    let e = lam / 2.0 - s.params.thetainf / 2.0 * log_lam;
    series * C2Matrix::exp_j(e)
}
