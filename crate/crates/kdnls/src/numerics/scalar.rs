use super::dd::{CDd, Dd};
use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Complex scalar used by precision-generic kernels.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn conj(self) -> Self;
    /// Approximate modulus in double precision, used for pivoting and scaling.
    fn modulus(self) -> f64;

    #[inline]
    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    #[inline]
    fn i() -> Self {
        Self::from_c64(Complex64::new(0.0, 1.0))
    }

    #[inline]
    fn powu(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    #[inline]
    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        z
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        self
    }
    #[inline]
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
}

impl Scalar for CDd {
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        CDd::from_c64(z)
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        CDd::to_c64(self)
    }
    #[inline]
    fn exp(self) -> Self {
        CDd::exp(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        CDd::sqrt(self)
    }
    #[inline]
    fn conj(self) -> Self {
        CDd::conj(self)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        CDd::new(self.re.mul_f64(k), self.im.mul_f64(k))
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        CDd::new(Dd::from_f64(x), Dd::ZERO)
    }
}
