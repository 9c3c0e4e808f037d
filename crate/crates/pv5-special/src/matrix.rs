use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::SpecialError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A complex 2x2 matrix stored row by row.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct C2Matrix {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl fmt::Debug for C2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

impl C2Matrix {
    pub const ZERO: Self = Self::new(ZERO, ZERO, ZERO, ZERO);
    pub const I: Self = Self::new(ONE, ZERO, ZERO, ONE);
    /// `diag(1, -1)`.
    pub const J: Self = Self::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0));
    /// Upper nilpotent `[[0, 1], [0, 0]]`.
    pub const DELTA_PLUS: Self = Self::new(ZERO, ONE, ZERO, ZERO);
    /// Lower nilpotent `[[0, 0], [1, 0]]`.
    pub const DELTA_MINUS: Self = Self::new(ZERO, ZERO, ONE, ZERO);

    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    /// `f0 J + fp Δ+ + fm Δ-`, the traceless form used for residue matrices.
    pub fn traceless(f0: Complex64, fp: Complex64, fm: Complex64) -> Self {
        Self::new(f0, fp, fm, -f0)
    }

    /// `exp(a J) = diag(e^a, e^-a)`.
    pub fn exp_j(a: Complex64) -> Self {
        Self::diag(a.exp(), (-a).exp())
    }

    pub fn from_array(a: [Complex64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn inv(&self) -> Result<Self, SpecialError> {
        let d = self.det();
        if !(d.norm() > 1e-300) {
            return Err(SpecialError::Singular(d.norm()));
        }
        let r = d.inv();
        Ok(Self::new(self.a22 * r, -self.a12 * r, -self.a21 * r, self.a11 * r))
    }

    /// Inverse of a matrix already known to have determinant one.
    pub fn inv_sl2(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Diagonal part.
    pub fn diagonal(&self) -> Self {
        Self::diag(self.a11, self.a22)
    }

    /// Off-diagonal part.
    pub fn off_diagonal(&self) -> Self {
        Self::new(ZERO, self.a12, self.a21, ZERO)
    }
}

impl Add for C2Matrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl AddAssign for C2Matrix {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for C2Matrix {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl SubAssign for C2Matrix {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for C2Matrix {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for C2Matrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Complex64> for C2Matrix {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

impl Mul<C2Matrix> for Complex64 {
    type Output = C2Matrix;
    fn mul(self, m: C2Matrix) -> C2Matrix {
        m.scale(self)
    }
}

impl Mul<f64> for C2Matrix {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }
}

impl Mul<C2Matrix> for f64 {
    type Output = C2Matrix;
    fn mul(self, m: C2Matrix) -> C2Matrix {
        m * self
    }
}

pub fn mat_mul(a: &C2Matrix, b: &C2Matrix) -> C2Matrix {
    *a * *b
}

pub fn mat_inv(a: &C2Matrix) -> Result<C2Matrix, SpecialError> {
    a.inv()
}

/// Eigenvalues from the characteristic quadratic, ordered by larger real part
/// first and then by larger imaginary part.
pub fn eigvals2(a: &C2Matrix) -> (Complex64, Complex64) {
    let half_tr = a.trace() * 0.5;
    let disc = (half_tr * half_tr - a.det()).sqrt();
    let (mut l1, mut l2) = (half_tr + disc, half_tr - disc);
    // Recover the smaller-modulus root from the product to avoid cancellation.
    if l1.norm() >= l2.norm() && l1.norm() > 0.0 {
        l2 = a.det() / l1;
    } else if l2.norm() > 0.0 {
        l1 = a.det() / l2;
    }
    let first = l1.re > l2.re || (l1.re == l2.re && l1.im >= l2.im);
    if first {
        (l1, l2)
    } else {
        (l2, l1)
    }
}
