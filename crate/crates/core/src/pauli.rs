//! Two-component spinors and 2×2 complex matrices over the Pauli basis.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A value of the two-component wave function at one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor { c1: ZERO, c2: ZERO };

    pub const fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    pub fn real(c1: f64, c2: f64) -> Self {
        Self::new(Complex64::new(c1, 0.0), Complex64::new(c2, 0.0))
    }

    /// |c1|² + |c2|².
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    /// Hermitian inner product `self* · other`.
    pub fn dot(&self, other: &Spinor) -> Complex64 {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    pub fn scale(self, s: Complex64) -> Spinor {
        Spinor::new(self.c1 * s, self.c2 * s)
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, rhs: Spinor) {
        self.c1 += rhs.c1;
        self.c2 += rhs.c2;
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

impl SubAssign for Spinor {
    fn sub_assign(&mut self, rhs: Spinor) {
        self.c1 -= rhs.c1;
        self.c2 -= rhs.c2;
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.c1, -self.c2)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: f64) -> Spinor {
        Spinor::new(self.c1 * rhs, self.c2 * rhs)
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: Complex64) -> Spinor {
        self.scale(rhs)
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub const IDENTITY: Mat2 = Mat2::new([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2::new([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const SIGMA1: Mat2 = Mat2::new([[ZERO, ONE], [ONE, ZERO]]);
    pub const SIGMA2: Mat2 = Mat2::new([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]]);
    pub const SIGMA3: Mat2 = Mat2::new([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    /// `alpha·I + beta·σ1 + gamma·σ2 + delta·σ3`, built directly from its entries.
    pub fn pauli(alpha: Complex64, beta: Complex64, gamma: Complex64, delta: Complex64) -> Self {
        Mat2::new([
            [alpha + delta, beta - I * gamma],
            [beta + I * gamma, alpha - delta],
        ])
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        Spinor::new(
            self.m[0][0] * s.c1 + self.m[0][1] * s.c2,
            self.m[1][0] * s.c1 + self.m[1][1] * s.c2,
        )
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Closed-form inverse; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let inv = d.inv();
        Some(Mat2::new([
            [self.m[1][1] * inv, -self.m[0][1] * inv],
            [-self.m[1][0] * inv, self.m[0][0] * inv],
        ]))
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2::new([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] += rhs.m[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] -= rhs.m[r][c];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        out
    }
}

impl Mul<Spinor> for Mat2 {
    type Output = Spinor;
    fn mul(self, rhs: Spinor) -> Spinor {
        self.apply(&rhs)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: f64) -> Mat2 {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// `σ_axis` for axis 1 or 2 (the spatial Pauli matrices).
pub fn sigma(axis: usize) -> Mat2 {
    match axis {
        1 => Mat2::SIGMA1,
        2 => Mat2::SIGMA2,
        3 => Mat2::SIGMA3,
        _ => panic!("no Pauli matrix for axis {axis}"),
    }
}

/// `Φ* σ Φ`, real for Hermitian `σ`; returns the complex value so callers may check the residue.
pub fn quadratic_form(m: &Mat2, s: &Spinor) -> Complex64 {
    s.dot(&m.apply(s))
}
