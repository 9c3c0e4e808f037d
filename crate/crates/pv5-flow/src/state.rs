use pv5_series::{ABPair, Parameters};
use pv5_special::{C2Matrix, Complex64};

/// A point `x` together with the residues `A0(x)`, `Ax(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub x: Complex64,
    pub a0: C2Matrix,
    pub ax: C2Matrix,
    pub params: Parameters,
}

/// The quantities the flow conserves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowInvariants {
    pub det_a0: Complex64,
    pub det_ax: Complex64,
    pub tr_a0: Complex64,
    pub tr_ax: Complex64,
    pub sum11: Complex64,
}

impl FlowInvariants {
    pub fn distance(&self, other: &Self) -> f64 {
        [
            self.det_a0 - other.det_a0,
            self.det_ax - other.det_ax,
            self.tr_a0 - other.tr_a0,
            self.tr_ax - other.tr_ax,
            self.sum11 - other.sum11,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }
}

impl FlowState {
    pub fn from_pair(pair: &ABPair, params: Parameters) -> Self {
        Self { x: pair.x, a0: pair.a0, ax: pair.ax, params }
    }

    pub fn invariants(&self) -> FlowInvariants {
        FlowInvariants {
            det_a0: self.a0.det(),
            det_ax: self.ax.det(),
            tr_a0: self.a0.trace(),
            tr_ax: self.ax.trace(),
            sum11: self.a0.a11 + self.ax.a11,
        }
    }

    /// Largest violation of `tr = 0`, `det A0 = -θ0²/4`, `det Ax = -θx²/4` and
    /// `(A0 + Ax)11 = -θ∞/2`.
    pub fn constraint_defect(&self) -> f64 {
        let p = &self.params;
        let inv = self.invariants();
        [
            inv.det_a0 + p.theta0 * p.theta0 / 4.0,
            inv.det_ax + p.thetax * p.thetax / 4.0,
            inv.tr_a0,
            inv.tr_ax,
            inv.sum11 + p.thetainf / 2.0,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }

    /// Entrywise distance to another state's residues.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.a0 - other.a0).max_abs().max((self.ax - other.ax).max_abs())
    }
}
