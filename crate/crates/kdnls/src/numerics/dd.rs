//! Double-double real and complex arithmetic.
//!
//! A value is stored as an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 31 significant decimal digits. Sums and products are built
//! from the error-free transformations TwoSum and FMA-based TwoProd.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Real double-double number.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd::new(std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
const FRAC_PI_2: Dd = Dd::new(std::f64::consts::FRAC_PI_2, 6.123_233_995_736_766e-17);
const EPS: f64 = 4.93e-32;

impl Dd {
    pub const ZERO: Dd = Dd::new(0.0, 0.0);
    pub const ONE: Dd = Dd::new(1.0, 0.0);

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplication by a power of two; exact.
    #[inline]
    pub fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Dd::new(self.hi * f, self.lo * f)
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd::new(hi, lo)
    }

    #[inline]
    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::new(f64::NAN, f64::NAN);
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let r = self - Dd::from_f64(ax).sqr();
        let (hi, lo) = two_sum(ax, r.hi * x * 0.5);
        Dd::new(hi, lo)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.7 {
            return Dd::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // expm1 on the reduced argument, |r| < 3.4e-4
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = (term * r) / Dd::from_f64(n);
            sum = sum + term;
            if term.hi.abs() < EPS * sum.hi.abs().max(1e-300) || n > 30.0 {
                break;
            }
        }
        // (1+p)^2 - 1 = p(p+2), applied ten times to undo the 2^-10 scaling
        for _ in 0..10 {
            sum = sum * (sum + Dd::from_f64(2.0));
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    /// Returns `(sin, cos)`.
    pub fn sin_cos(self) -> (Self, Self) {
        if !self.is_finite() {
            return (Dd::new(f64::NAN, 0.0), Dd::new(f64::NAN, 0.0));
        }
        let k = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2.mul_f64(k);
        let r2 = r.sqr();
        let mut s = r;
        let mut term = r;
        let mut n = 1.0;
        loop {
            term = -(term * r2) / Dd::from_f64((n + 1.0) * (n + 2.0));
            n += 2.0;
            s = s + term;
            if term.hi.abs() < EPS * s.hi.abs().max(1e-300) || n > 60.0 {
                break;
            }
        }
        let mut c = Dd::ONE;
        let mut term = Dd::ONE;
        let mut n = 0.0;
        loop {
            term = -(term * r2) / Dd::from_f64((n + 1.0) * (n + 2.0));
            n += 2.0;
            c = c + term;
            if term.hi.abs() < EPS || n > 60.0 {
                break;
            }
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Dd::new(hi, lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd::new(hi, lo)
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo) + Dd::from_f64(q3)
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    #[inline]
    pub const fn new(re: Dd, im: Dd) -> Self {
        CDd { re, im }
    }

    #[inline]
    pub fn from_c64(z: Complex64) -> Self {
        CDd::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
    }

    #[inline]
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn conj(self) -> Self {
        CDd::new(self.re, -self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    pub fn exp(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        CDd::new(m * c, m * s)
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        if self.re.hi == 0.0 && self.im.hi == 0.0 {
            return CDd::default();
        }
        let r = self.norm_sqr().sqrt();
        if self.re.hi >= 0.0 {
            let u = ((r + self.re).ldexp(-1)).sqrt();
            let v = self.im / (u.ldexp(1));
            CDd::new(u, v)
        } else {
            let mut v = ((r - self.re).ldexp(-1)).sqrt();
            if self.im.hi.is_sign_negative() {
                v = -v;
            }
            let u = self.im / (v.ldexp(1));
            CDd::new(u, v)
        }
    }
}

impl Add for CDd {
    type Output = CDd;
    #[inline]
    fn add(self, b: CDd) -> CDd {
        CDd::new(self.re + b.re, self.im + b.im)
    }
}

impl Sub for CDd {
    type Output = CDd;
    #[inline]
    fn sub(self, b: CDd) -> CDd {
        CDd::new(self.re - b.re, self.im - b.im)
    }
}

impl Neg for CDd {
    type Output = CDd;
    #[inline]
    fn neg(self) -> CDd {
        CDd::new(-self.re, -self.im)
    }
}

impl Mul for CDd {
    type Output = CDd;
    #[inline]
    fn mul(self, b: CDd) -> CDd {
        CDd::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl Div for CDd {
    type Output = CDd;
    #[inline]
    fn div(self, b: CDd) -> CDd {
        let d = b.norm_sqr();
        let n = self * b.conj();
        CDd::new(n.re / d, n.im / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_third_round_trip() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = Dd::from_f64(2.0).sqrt();
        assert!((r.sqr() - Dd::from_f64(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_log_identities() {
        let e = Dd::ONE.exp();
        // e = 2.718281828459045 + 1.4456468917292502e-16
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-30);
        let a = Dd::from_f64(3.7).exp() * Dd::from_f64(-3.7).exp();
        assert!((a - Dd::ONE).to_f64().abs() < 1e-30);
    }

    #[test]
    fn sin_cos_pythagoras() {
        for &x in &[0.1, 1.0, 2.5, -7.3, 40.0, 123.456] {
            let (s, c) = Dd::from_f64(x).sin_cos();
            let one = s.sqr() + c.sqr();
            assert!((one - Dd::ONE).to_f64().abs() < 1e-30, "x={x}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-14);
            assert!((c.to_f64() - x.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_sqrt_principal() {
        let z = CDd::from_c64(Complex64::new(-4.0, 1e-3));
        let r = z.sqrt();
        let back = r * r - z;
        assert!(back.to_c64().norm() < 1e-28);
        assert!(r.re.hi > 0.0);
        let w = Complex64::new(0.3, -2.0);
        assert!((CDd::from_c64(w).sqrt().to_c64() - w.sqrt()).norm() < 1e-15);
    }
}
