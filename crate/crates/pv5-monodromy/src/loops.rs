use std::f64::consts::{FRAC_PI_2, PI, TAU};

use pv5_special::{c64, Complex64};

use crate::MonodromyError;

/// One piece of a contour in the λ-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    /// `center + radius·e^{iφ}` for φ running from `start` to `end` (radians).
    Arc { center: Complex64, radius: f64, start: f64, end: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, start, end, .. } => radius * (end - start).abs(),
        }
    }

    /// Position and unit-speed velocity at arclength `s`.
    pub fn at(&self, s: f64) -> (Complex64, Complex64) {
        match *self {
            Segment::Line { from, to } => {
                let len = (to - from).norm();
                let dir = (to - from) / len;
                (from + dir * s, dir)
            }
            Segment::Arc { center, radius, start, end } => {
                let sign = (end - start).signum();
                let phi = start + sign * s / radius;
                let e = Complex64::from_polar(1.0, phi);
                (center + e * radius, c64(0.0, sign) * e)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.at(0.0).0
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { to, .. } => to,
            Segment::Arc { center, radius, end, .. } => center + Complex64::from_polar(radius, end),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, end } => Segment::Arc { center, radius, start: end, end: start },
        }
    }

    fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let t = ((p - from).conj() * d).re / d.norm_sqr();
                (from + d * t.clamp(0.0, 1.0) - p).norm()
            }
            Segment::Arc { .. } => {
                let n = 2048;
                let len = self.length();
                (0..=n).map(|k| (self.at(len * k as f64 / n as f64).0 - p).norm()).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// A closed contour starting and ending at `base_point`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    pub base_point: Complex64,
    pub segments: Vec<Segment>,
    pub encircled_point: Complex64,
    pub orientation: i32,
}

impl LoopSpec {
    /// Descend from `i·radius` to `x + i·r`, go once round `|λ - x| = r`
    /// counter-clockwise from the top, and come back the same way.
    pub fn around_x(x: Complex64, radius: f64, r: f64) -> Self {
        let base = c64(0.0, radius);
        let approach = vec![Segment::Line { from: base, to: x + c64(0.0, r) }];
        let circle = Segment::Arc { center: x, radius: r, start: FRAC_PI_2, end: FRAC_PI_2 + TAU };
        Self::out_and_back(base, approach, circle, x)
    }

    /// Descend to `x + i·r`, pass `x` on its left along the half circle to
    /// `x - i·r`, continue to `i·r`, go once round `|λ| = r` counter-clockwise
    /// from the top, and come back the same way.
    pub fn around_origin(x: Complex64, radius: f64, r: f64) -> Self {
        let base = c64(0.0, radius);
        let approach = vec![
            Segment::Line { from: base, to: x + c64(0.0, r) },
            Segment::Arc { center: x, radius: r, start: FRAC_PI_2, end: 1.5 * PI },
            Segment::Line { from: x - c64(0.0, r), to: c64(0.0, r) },
        ];
        let circle = Segment::Arc { center: c64(0.0, 0.0), radius: r, start: FRAC_PI_2, end: FRAC_PI_2 + TAU };
        Self::out_and_back(base, approach, circle, c64(0.0, 0.0))
    }

    fn out_and_back(base: Complex64, approach: Vec<Segment>, circle: Segment, target: Complex64) -> Self {
        let mut segments = approach.clone();
        segments.push(circle);
        segments.extend(approach.iter().rev().map(Segment::reversed));
        Self { base_point: base, segments, encircled_point: target, orientation: 1 }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn min_distance(&self, p: Complex64) -> f64 {
        self.segments.iter().map(|s| s.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Winding number about `p`, by accumulating the argument along a fine sampling.
    pub fn winding_number(&self, p: Complex64) -> i32 {
        let mut total = 0.0;
        for seg in &self.segments {
            let len = seg.length();
            let n = ((len / 0.05).ceil() as usize).max(64);
            let mut prev = seg.start() - p;
            for k in 1..=n {
                let cur = seg.at(len * k as f64 / n as f64).0 - p;
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        (total / TAU).round() as i32
    }

    /// Closedness, clearance `min_clearance` from both singular points, and
    /// the winding numbers about `encircled` and `other`.
    pub fn validate(&self, other: Complex64, min_clearance: f64) -> Result<(), MonodromyError> {
        let mut at = self.base_point;
        for seg in &self.segments {
            if (seg.start() - at).norm() > 1e-9 {
                return Err(MonodromyError::InvalidLoop("segments are not contiguous"));
            }
            at = seg.end();
        }
        if (at - self.base_point).norm() > 1e-9 {
            return Err(MonodromyError::InvalidLoop("path is not closed"));
        }
        for p in [self.encircled_point, other] {
            let d = self.min_distance(p);
            if d < min_clearance {
                return Err(MonodromyError::TooCloseToSingularity { point: p, distance: d });
            }
        }
        if self.winding_number(self.encircled_point) != self.orientation || self.winding_number(other) != 0 {
            return Err(MonodromyError::InvalidLoop("wrong winding numbers"));
        }
        Ok(())
    }
}
