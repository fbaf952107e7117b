//! 2×2 complex matrices and the su(2)/SU(2) structure.
//!
//! Every discrete form in this crate carries `Matrix2` coefficients
//! (gl(2,ℂ)). The su(2) basis is fixed as `λ_α = σ_α / (2i)` with the
//! standard Pauli matrices.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute tolerance used by the su(2)/SU(2) predicates.
pub const PREDICATE_TOL: f64 = 1e-10;

const SINC_SERIES_THRESHOLD: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2×2 complex matrix, entries stored row-major `[m11, m12, m21, m22]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Matrix2 {
    pub m: [Complex64; 4],
}

impl Matrix2 {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self {
            m: [m11, m12, m21, m22],
        }
    }

    pub const fn zero() -> Self {
        Self { m: [ZERO; 4] }
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn from_real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self::new(m11.into(), m12.into(), m21.into(), m22.into())
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::new(c, ZERO, ZERO, c)
    }

    /// Pauli matrix σ_α for α ∈ {1, 2, 3}.
    pub fn pauli(alpha: usize) -> Self {
        let i = Complex64::i();
        match alpha {
            1 => Self::new(ZERO, ONE, ONE, ZERO),
            2 => Self::new(ZERO, -i, i, ZERO),
            3 => Self::new(ONE, ZERO, ZERO, -ONE),
            _ => panic!("Pauli index must be 1, 2 or 3, got {alpha}"),
        }
    }

    /// su(2) basis element λ_α = σ_α / (2i).
    pub fn lambda(alpha: usize) -> Self {
        Self::pauli(alpha).scale_c(Complex64::new(0.0, -0.5))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m.map(|z| z * s),
        }
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        Self {
            m: self.m.map(|z| z * s),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let [a, b, c, d] = self.m;
        Self::new(a.conj(), c.conj(), b.conj(), d.conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Matrix inverse, `None` when the determinant vanishes exactly.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO {
            return None;
        }
        let [a, b, c, d] = self.m;
        let inv = det.inv();
        Some(Self::new(d * inv, -b * inv, -c * inv, a * inv))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm squared, `tr(m m†)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Deviation from anti-Hermitian tracelessness.
    pub fn su2_algebra_defect(&self) -> f64 {
        let herm = (*self + self.conj_transpose()).max_abs();
        herm.max(self.trace().norm())
    }

    /// Deviation from unitarity with unit determinant.
    pub fn su2_group_defect(&self) -> f64 {
        let unit = (*self * self.conj_transpose() - Self::identity()).max_abs();
        unit.max((self.det() - ONE).norm())
    }

    pub fn is_su2_algebra(&self) -> bool {
        self.su2_algebra_defect() <= PREDICATE_TOL
    }

    pub fn is_su2_group(&self) -> bool {
        self.su2_group_defect() <= PREDICATE_TOL
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            m: std::array::from_fn(|i| self.m[i] + rhs.m[i]),
        }
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            m: std::array::from_fn(|i| self.m[i] - rhs.m[i]),
        }
    }
}

impl AddAssign for Matrix2 {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.m.iter_mut().zip(rhs.m) {
            *a += b;
        }
    }
}

impl SubAssign for Matrix2 {
    fn sub_assign(&mut self, rhs: Self) {
        for (a, b) in self.m.iter_mut().zip(rhs.m) {
            *a -= b;
        }
    }
}

impl Neg for Matrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { m: self.m.map(|z| -z) }
    }
}

impl Mul for Matrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = rhs.m;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}

impl Mul<f64> for Matrix2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

// JSON encoding: [[re,im],[re,im],[re,im],[re,im]], row-major.
impl Serialize for Matrix2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: [[f64; 2]; 4] = self.m.map(|z| [z.re, z.im]);
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = <[[f64; 2]; 4]>::deserialize(deserializer)?;
        Ok(Self {
            m: pairs.map(|[re, im]| Complex64::new(re, im)),
        })
    }
}

/// Real coordinates `(a1, a2, a3)` of `Σ a_α λ_α` in su(2).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Su2Vector(pub [f64; 3]);

impl Su2Vector {
    pub const ZERO: Self = Self([0.0; 3]);

    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self([a1, a2, a3])
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + s * other.0[i]))
    }
}

pub fn embed_su2(v: Su2Vector) -> Matrix2 {
    // Σ a_α σ_α/(2i) = -(i/2) [[a3, a1 - i a2], [a1 + i a2, -a3]]
    let [a1, a2, a3] = v.0;
    let h = Complex64::new(0.0, -0.5);
    Matrix2::new(
        h * a3,
        h * Complex64::new(a1, -a2),
        h * Complex64::new(a1, a2),
        h * (-a3),
    )
}

/// Coordinates of the anti-Hermitian traceless part of `m` in the λ basis.
///
/// Uses `tr(λ_α λ_β) = -δ_αβ / 2`.
pub fn project_su2(m: &Matrix2) -> Su2Vector {
    let skew = *m - m.conj_transpose();
    Su2Vector(std::array::from_fn(|a| -(Matrix2::lambda(a + 1) * skew).trace().re))
}

/// Group exponential of `embed_su2(v)`, closed form.
pub fn exp_su2(v: Su2Vector) -> Matrix2 {
    let half = 0.5 * v.norm();
    let sinc = if half < SINC_SERIES_THRESHOLD {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    Matrix2::identity().scale(half.cos()) + embed_su2(v).scale(sinc)
}

pub fn is_su2_algebra(m: &Matrix2) -> bool {
    m.is_su2_algebra()
}

pub fn is_su2_group(m: &Matrix2) -> bool {
    m.is_su2_group()
}
