//! Closed-form solutions used as oracles.
//!
//! Every entry comes in two transcriptions. `AsPrinted` reproduces the
//! reference formulas character for character. `Corrected` applies the minimal
//! typo fixes needed for the formula to satisfy the equation and agree with
//! the Darboux engine; each fix is listed on the constructor.

use crate::lax::{make_plane_wave_seed, Seed};
use crate::numerics::{ComplexField2D, Grid2D};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("degenerate eigenvalue: {0}")]
    DegenerateEigenvalue(String),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transcription {
    AsPrinted,
    #[default]
    Corrected,
}

impl std::str::FromStr for Transcription {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-printed" => Ok(Transcription::AsPrinted),
            "corrected" => Ok(Transcription::Corrected),
            other => Err(format!(
                "unknown transcription '{other}' (expected as-printed or corrected)"
            )),
        }
    }
}

impl std::fmt::Display for Transcription {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Transcription::AsPrinted => "as-printed",
            Transcription::Corrected => "corrected",
        })
    }
}

/// Relative size below which a denominator counts as vanishing.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// Numerator and denominator of a rational closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fraction {
    pub num: Complex64,
    pub den: Complex64,
}

impl Fraction {
    pub fn is_pole(&self) -> bool {
        self.den == Complex64::new(0.0, 0.0)
            || !self.den.is_finite()
            || self.den.norm() < POLE_THRESHOLD * self.num.norm()
    }

    pub fn value(&self) -> Option<Complex64> {
        if self.is_pole() {
            None
        } else {
            Some(self.num / self.den)
        }
    }
}

type Formula = Arc<dyn Fn(f64, f64) -> Fraction + Send + Sync>;

#[derive(Clone)]
pub struct CatalogEntry {
    name: &'static str,
    params: Vec<(&'static str, f64)>,
    transcription: Transcription,
    seed: Seed,
    formula: Formula,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("transcription", &self.transcription)
            .finish()
    }
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    pub fn transcription(&self) -> Transcription {
        self.transcription
    }

    /// Seed whose α and θ define the equation the entry solves.
    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn fraction(&self, x: f64, t: f64) -> Fraction {
        (self.formula)(x, t)
    }

    /// `None` on the pole set.
    pub fn try_eval(&self, x: f64, t: f64) -> Option<Complex64> {
        self.fraction(x, t).value()
    }

    /// NaN on the pole set.
    pub fn eval(&self, x: f64, t: f64) -> Complex64 {
        self.try_eval(x, t)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    pub fn sample(&self, grid: &Grid2D) -> ComplexField2D {
        let vals: Vec<Option<Complex64>> = (0..grid.len())
            .into_par_iter()
            .map(|k| self.try_eval(grid.x(k % grid.nx), grid.t(k / grid.nx)))
            .collect();
        let flagged = vals.iter().map(|v| v.is_none()).collect();
        let values = vals
            .into_iter()
            .map(|v| v.unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
            .collect();
        ComplexField2D {
            grid: *grid,
            values,
            flagged,
            degraded: vec![false; grid.len()],
        }
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn require_positive(name: &'static str, value: f64) -> Result<(), CatalogError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CatalogError::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        })
    }
}

fn zero_seed(alpha: f64, p: f64, q: f64) -> Seed {
    Seed::zero(alpha, p, q).expect("validated coupling")
}

fn printed_plane_wave() -> Seed {
    make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).expect("printed plane wave")
}

/// One soliton from the eigenvalue pair `m1 ± i n1` on the zero seed.
///
/// Corrected form:
/// `(λ₁² − λ₂²)(e^{iF₂}λ₁ − e^{iF₁}λ₂) / (√α (e^{−if}λ₁ − e^{if}λ₂)²)`
/// with the printed `F_i` and `f`.
pub fn one_soliton(
    m1: f64,
    n1: f64,
    alpha: f64,
    theta_p: f64,
    theta_q: f64,
    transcription: Transcription,
) -> Result<CatalogEntry, CatalogError> {
    if n1 == 0.0 {
        return Err(CatalogError::DegenerateEigenvalue(
            "n1 = 0 makes λ₁ = λ₂".into(),
        ));
    }
    require_positive("alpha", alpha)?;
    let l1 = Complex64::new(m1, n1);
    let l2 = l1.conj();
    let sa = alpha.sqrt();
    let formula: Formula = Arc::new(move |x, t| {
        let theta = theta_p * x + theta_q * t;
        let big_f = |l: Complex64| -0.25 * (-2.0 * l * l * x + l.powu(4) * t + 4.0 * theta);
        let (f1, f2) = (big_f(l1), big_f(l2));
        let f = 0.125 * (l1 - l2) * (l1 + l2) * (t * l1 * l1 - 2.0 * x + t * l2 * l2);
        match transcription {
            Transcription::AsPrinted => Fraction {
                num: ((I * f1).exp() * l1 - (I * f2).exp() * l2) * (l1 + l2),
                den: (-2.0 * I * f).exp() * sa * (l1 - l2),
            },
            Transcription::Corrected => {
                let d = (-I * f).exp() * l1 - (I * f).exp() * l2;
                Fraction {
                    num: (l1 * l1 - l2 * l2) * ((I * f2).exp() * l1 - (I * f1).exp() * l2),
                    den: sa * d * d,
                }
            }
        }
    });
    Ok(CatalogEntry {
        name: "one_soliton",
        params: vec![
            ("m1", m1),
            ("n1", n1),
            ("alpha", alpha),
            ("theta_p", theta_p),
            ("theta_q", theta_q),
        ],
        transcription,
        seed: zero_seed(alpha, theta_p, theta_q),
        formula,
    })
}

/// Two solitons from `m1 ± i n1` and `m2 ± i n2` on the zero seed, θ = x + t.
///
/// Corrected form: `K₁ = −4ie^{−iθ}XY`, `K₂ = −√α Z²` where, with
/// `K = 16m₁n₁m₂n₂`,
/// - `Z = −K(|E|²e^{−iρ₁} + |F|²e^{iρ₁}) + H₄′e^{ρ₂} + H₃′e^{ρ₃} + H₂′e^{ρ₄} + H₁′e^{ρ₅}`,
/// - `X = −K(|E|²e^{iρ₁} + |F|²e^{−iρ₁}) + H₁′e^{ρ₂} + H₂′e^{ρ₃} + H₃′e^{ρ₄} + H₄′e^{ρ₅}`,
/// - `Y = H₅′e^{ρ₆} + H₆′e^{−ρ₆*} + H₇′e^{ρ₇′} + H₈′e^{−ρ₇′*}`,
///
/// `H₁′..H₄′` are the printed ones with `|B|` and `|C|` exchanged,
/// `H₅′ = −m₁n₁A*B*CDF`, `H₆′ = m₁n₁ABC*D*F*`, `H₇′ = −m₂n₂A*B*C*D*E`,
/// `H₈′ = m₂n₂ABCDE*`, and `ρ₇′` flips the sign of the `2xm₂²` term.
///
/// The printed display leaves `M` undefined; `AsPrinted` reads
/// `2M = −K(|E|² + |F|²)`.
pub fn two_soliton(
    m1: f64,
    n1: f64,
    m2: f64,
    n2: f64,
    alpha: f64,
    transcription: Transcription,
) -> Result<CatalogEntry, CatalogError> {
    if n1 == 0.0 || n2 == 0.0 {
        return Err(CatalogError::DegenerateEigenvalue(
            "imaginary parts must be nonzero".into(),
        ));
    }
    if m1 == m2 && n1 == n2 {
        return Err(CatalogError::DegenerateEigenvalue(
            "the two pairs coincide".into(),
        ));
    }
    require_positive("alpha", alpha)?;
    let a = Complex64::new(-(m1 + m2), n1 + n2);
    let b = Complex64::new(m2 - m1, n1 - n2);
    let cc = Complex64::new(m2 - m1, n1 + n2);
    let d = Complex64::new(-(m1 + m2), n1 - n2);
    let e = Complex64::new(-m1, n1);
    let f = Complex64::new(-m2, n2);
    let (a2, b2, c2, d2) = (a.norm_sqr(), b.norm_sqr(), cc.norm_sqr(), d.norm_sqr());
    let (mn1, mn2) = (m1 * n1, m2 * n2);
    let k = 16.0 * mn1 * mn2;
    let sa = alpha.sqrt();
    let h: [Complex64; 8] = match transcription {
        Transcription::AsPrinted => [
            -a2 * c2 * e * f,
            b2 * d2 * e * f.conj(),
            b2 * d2 * e.conj() * f,
            -a2 * c2 * e.conj() * f.conj(),
            -mn1 * a.conj() * b * cc.conj() * d * f,
            mn1 * a * b.conj() * cc * d * f.conj(),
            mn2 * a.conj() * b.conj() * cc * d * e,
            mn1 * a * b * cc * d.conj() * e.conj(),
        ],
        Transcription::Corrected => [
            -a2 * b2 * e * f,
            c2 * d2 * e * f.conj(),
            c2 * d2 * e.conj() * f,
            -a2 * b2 * e.conj() * f.conj(),
            -mn1 * a.conj() * b.conj() * cc * d * f,
            mn1 * a * b * cc.conj() * d.conj() * f.conj(),
            -mn2 * a.conj() * b.conj() * cc.conj() * d.conj() * e,
            mn2 * a * b * cc * d * e.conj(),
        ],
    };
    let (e2, f2) = (e.norm_sqr(), f.norm_sqr());
    let sign7 = match transcription {
        Transcription::AsPrinted => 2.0,
        Transcription::Corrected => -2.0,
    };
    let formula: Formula = Arc::new(move |x, t| {
        let (p1, q1, p2, q2) = (m1, n1, m2, n2);
        let r1 = 0.25
            * (t * p1.powi(4) - t * p2.powi(4) - t * q2.powi(4)
                + t * q1.powi(4)
                + 6.0 * t * p2 * p2 * q2 * q2
                - 6.0 * t * p1 * p1 * q1 * q1
                - 2.0 * x * p1 * p1
                + 2.0 * x * p2 * p2
                + 2.0 * x * q1 * q1
                - 2.0 * x * q2 * q2);
        let u1 = t * p1.powi(3) * q1 - t * p1 * q1.powi(3);
        let u2 = t * p2.powi(3) * q2 - t * p2 * q2.powi(3);
        let (w1, w2) = (x * p1 * q1, x * p2 * q2);
        let r2 = u1 + u2 - w1 - w2;
        let r3 = u1 - u2 - w1 + w2;
        let r4 = -u1 + u2 + w1 - w2;
        let r5 = -u1 - u2 + w1 + w2;
        let r6 = -0.25
            * I
            * (c(t * p1.powi(4) + t * q1.powi(4)
                - 6.0 * t * p1 * p1 * q1 * q1
                - 2.0 * x * p1 * p1
                + 2.0 * x * q1 * q1)
                + 4.0 * I * (t * p2.powi(3) * q2 - t * p2 * q2.powi(3) - x * p2 * q2));
        let r7 = -0.25
            * I
            * (c(
                t * p2.powi(4) + t * q2.powi(4) - 6.0 * t * p2 * p2 * q2 * q2
                    + sign7 * x * p2 * p2
                    + 2.0 * x * q2 * q2,
            ) + 4.0 * I * (t * p1.powi(3) * q1 - t * p1 * q1.powi(3) - x * p1 * q1));
        let theta = x + t;
        let ex = [r2.exp(), r3.exp(), r4.exp(), r5.exp()];
        let y = h[4] * r6.exp()
            + h[5] * (-r6.conj()).exp()
            + h[6] * r7.exp()
            + h[7] * (-r7.conj()).exp();
        let (top, bottom) = match transcription {
            Transcription::AsPrinted => {
                let two_m_cos = c(-k * (e2 + f2) * r1.cos());
                (
                    two_m_cos + h[0] * ex[0] + h[1] * ex[1] + h[2] * ex[2] + h[3] * ex[3],
                    two_m_cos + h[3] * ex[0] + h[2] * ex[1] + h[1] * ex[2] + h[0] * ex[3],
                )
            }
            Transcription::Corrected => {
                let ph = (I * r1).exp();
                let ph_inv = ph.conj();
                (
                    -k * (e2 * ph + f2 * ph_inv)
                        + h[0] * ex[0]
                        + h[1] * ex[1]
                        + h[2] * ex[2]
                        + h[3] * ex[3],
                    -k * (e2 * ph_inv + f2 * ph)
                        + h[3] * ex[0]
                        + h[2] * ex[1]
                        + h[1] * ex[2]
                        + h[0] * ex[3],
                )
            }
        };
        Fraction {
            num: -4.0 * I * (-I * theta).exp() * top * y,
            den: -sa * bottom * bottom,
        }
    });
    Ok(CatalogEntry {
        name: "two_soliton",
        params: vec![
            ("m1", m1),
            ("n1", n1),
            ("m2", m2),
            ("n2", n2),
            ("alpha", alpha),
        ],
        transcription,
        seed: zero_seed(alpha, 1.0, 1.0),
        formula,
    })
}

/// Positon at the double eigenvalue `re1 + i im1` on the zero seed, θ = x + t, α = 1.
///
/// `AsPrinted` reads the undefined `H₂` in `G₂ = cos H₂ + i sin H₂` as `g₂`.
/// `Corrected` is the exact coalescence limit
/// `Q_p = e^{−iθ}Ω₂₁Ω₂₂ / Ω₁₁²` with, for `L = re1 + i im1`, `M = L*`,
/// `2A(z) = −iz²x/2 + iz⁴t/4`:
/// - `Ω₁₁ = −4LM³e^{2A(L)−2A(M)} − 4L³Me^{−2A(L)+2A(M)} + P(i)`,
/// - `Ω₂₁ = −4LM³e^{−2A(L)+2A(M)} − 4L³Me^{2A(L)−2A(M)} + P(−i)`,
/// - `Ω₂₂ = −2iL(L²−M²)(−L²M⁴t + L²M²x + iL² + M⁶t − M⁴x + 3iM²)e^{−2A(L)}
///   − 2iM(L²−M²)(−L⁶t + L⁴M²t + L⁴x − L²M²x − 3iL² − iM²)e^{−2A(M)}`,
///
/// where `P` is a polynomial in `u = L²`, `v = M²`, x and t.
pub fn positon(
    re1: f64,
    im1: f64,
    transcription: Transcription,
) -> Result<CatalogEntry, CatalogError> {
    if re1 * im1 == 0.0 {
        return Err(CatalogError::DegenerateEigenvalue(
            "re1·im1 must be nonzero".into(),
        ));
    }
    let formula: Formula = match transcription {
        Transcription::AsPrinted => Arc::new(move |x, t| positon_printed(re1, im1, x, t)),
        Transcription::Corrected => Arc::new(move |x, t| positon_exact(re1, im1, x, t)),
    };
    Ok(CatalogEntry {
        name: "positon",
        params: vec![("re1", re1), ("im1", im1)],
        transcription,
        seed: zero_seed(1.0, 1.0, 1.0),
        formula,
    })
}

fn positon_printed(a1: f64, b1: f64, x: f64, t: f64) -> Fraction {
    let g1 = -x - t * a1 * a1 - t * b1 * b1;
    let g2 = x + t + 0.25 * t * b1.powi(4) - 1.5 * t * a1 * a1 * b1 * b1
        + 0.5 * x * b1 * b1
        + 0.25 * t * a1.powi(4)
        - 0.5 * x * a1 * a1;
    let (ch, sh) = ((a1 * b1 * g1).cosh(), (a1 * b1 * g1).sinh());
    let (ch2, sh2) = ((2.0 * a1 * b1 * g1).cosh(), (2.0 * a1 * b1 * g1).sinh());
    let p = |n: i32| a1.powi(n);
    let q = |n: i32| b1.powi(n);
    let g1_re =
        2.0 * p(3) * b1 * t * ch - p(3) * q(2) * x * ch - a1 * q(4) * x * ch - a1 * q(6) * t * ch
            + 3.0 * p(5) * q(2) * t * ch
            - q(3) * sh;
    let g1_im = p(3) * ch - p(6) * b1 * t * sh
        + 2.0 * p(4) * q(3) * t * sh
        + p(4) * b1 * x * sh
        + p(2) * q(3) * x * sh
        + 3.0 * p(2) * q(2) * t * sh;
    let big_g1 = Complex64::new(g1_re, g1_im);
    let big_g2 = (I * g2).exp();
    let big_g3 = I
        * (2.0 * p(3) * b1 * sh2 + 4.0 * p(2) * q(6) * t
            - 4.0 * p(4) * q(2) * x
            - 24.0 * p(4) * q(4) * t
            + 2.0 * a1 * q(3) * sh2
            + 4.0 * p(6) * q(2) * t
            + 4.0 * p(2) * q(2) * t
            + 4.0 * p(2) * q(4) * x);
    let big_g4 = c(p(4) + q(4)
        - 4.0 * p(8) * q(2) * x * t
        - 4.0 * p(4) * q(6) * x * t
        - 4.0 * p(6) * q(4) * x * t
        + 4.0 * p(2) * q(8) * x * t
        + 4.0 * p(4) * q(4) * x * x
        + 8.0 * p(4) * q(8) * t * t
        + 2.0 * p(6) * q(2) * x * x
        + 2.0 * p(10) * q(2) * t * t
        + 8.0 * p(8) * q(4) * t * t
        + 12.0 * p(6) * q(6) * t * t
        + 2.0 * p(2) * q(6) * x * x
        + 2.0 * p(2) * q(10) * t * t
        - q(4) * ch2
        + p(4) * ch2);
    let diff = big_g3 - big_g4;
    Fraction {
        num: -8.0 * a1 * b1 * big_g1 * big_g2 * (big_g3 + big_g4),
        den: diff * diff,
    }
}

fn positon_poly(u: Complex64, v: Complex64, x: f64, t: f64, i: Complex64) -> Complex64 {
    let (u2, u3, u4) = (u * u, u * u * u, u * u * u * u);
    let (v2, v3, v4) = (v * v, v * v * v, v * v * v * v);
    let (t2, x2) = (t * t, x * x);
    -t2 * u4 * v2 + 2.0 * t2 * u3 * v3 - t2 * u2 * v4 + t * u4 * v * x
        - i * t * u4
        - t * u3 * v2 * x
        + 2.0 * i * t * u3 * v
        - t * u2 * v3 * x
        - 2.0 * i * t * u2 * v2
        + t * u * v4 * x
        + 2.0 * i * t * u * v3
        - i * t * v4
        - u3 * v * x2
        + i * u3 * x
        + 2.0 * u2 * v2 * x2
        - i * u2 * v * x
        + u2
        - u * v3 * x2
        - i * u * v2 * x
        + 6.0 * u * v
        + i * v3 * x
        + v2
}

fn positon_exact(re1: f64, im1: f64, x: f64, t: f64) -> Fraction {
    let l = Complex64::new(re1, im1);
    let m = l.conj();
    let two_a = |z: Complex64| -I * z * z * x / 2.0 + I * z.powu(4) * t / 4.0;
    let (al, am) = (two_a(l), two_a(m));
    let (u, v) = (l * l, m * m);
    let lm3 = -4.0 * l * m.powu(3);
    let l3m = -4.0 * l.powu(3) * m;
    let o11 = lm3 * (al - am).exp() + l3m * (am - al).exp() + positon_poly(u, v, x, t, I);
    let o21 = lm3 * (am - al).exp() + l3m * (al - am).exp() + positon_poly(u, v, x, t, -I);
    let diff = (l - m) * (l + m);
    let o22 = -2.0
        * I
        * l
        * diff
        * (-u * v * v * t + u * v * x + I * u + v * v * v * t - v * v * x + 3.0 * I * v)
        * (-al).exp()
        - 2.0
            * I
            * m
            * diff
            * (-u * u * u * t + u * u * v * t + u * u * x - u * v * x - 3.0 * I * u - I * v)
            * (-am).exp();
    Fraction {
        num: (-I * (x + t)).exp() * o21 * o22,
        den: o11 * o11,
    }
}

/// Breather on the plane wave a = −2, c = 1 with the printed numeric
/// coefficients. `Corrected` restores a missing factor `i` on the
/// `563508327e^{−0.2420614592t−2ix−it}` term of b₂ and the sign of the
/// exponent in the last term of b₁.
pub fn breather(transcription: Transcription) -> CatalogEntry {
    const K: f64 = 0.9682458364;
    const W: f64 = 0.2420614592;
    let formula: Formula = Arc::new(move |x, t| {
        let ekx = (-K * I * x).exp();
        let ekx_inv = (K * I * x).exp();
        let (ep, em) = (c((W * t).exp()), c((-W * t).exp()));
        let last_b1 = match transcription {
            Transcription::AsPrinted => ekx,
            Transcription::Corrected => ekx_inv,
        };
        let b1 = 63508327.0 * I * ekx + 436491673.0 * ep
            - 563508327.0 * I * ep
            - 436491673.0 * em
            - 563508327.0 * I * em
            + 5e8 * I * last_b1;
        let osc = (-2.0 * I * x - I * t).exp();
        let k4 = match transcription {
            Transcription::AsPrinted => c(563508327.0),
            Transcription::Corrected => I * 563508327.0,
        };
        let b2 = 1309475019.0 * em * osc
            + 10e8 * I * (-0.4e-8 * I * (257938541.0 * x + 2.5e8 * t)).exp()
            - 1309475019.0 * ep * osc
            + 563508327.0 * I * ep * osc
            + k4 * em * osc
            + 127016654.0 * I * (-0.4e-8 * I * (742061459.0 * x + 2.5e8 * t)).exp();
        let b3 = 5e8 * I * ekx + 63508327.0 * I * ekx_inv - 436491673.0 * ep - 563508327.0 * I * ep
            + 436491673.0 * em
            - 563508327.0 * I * em;
        Fraction {
            num: -b1 * b2,
            den: 2.0 * b3 * b3,
        }
    });
    CatalogEntry {
        name: "breather",
        params: Vec::new(),
        transcription,
        seed: printed_plane_wave(),
        formula,
    }
}

/// Breather x-period `2π / 0.9682458364`.
pub const BREATHER_PERIOD: f64 = 2.0 * std::f64::consts::PI / 0.9682458364;

fn v1(x: f64, t: f64) -> Complex64 {
    let (x2, t2) = (x * x, t * t);
    c(3.0 + 8.0 * x2 + 8.0 * x * t - 8.0 * t2 * x2 - 4.0 * t2 * t2 - 4.0 * x2 * x2 - 8.0 * t2)
        + I * (8.0 * t * x2 + 8.0 * x * t2 + 8.0 * x2 * x - 4.0 * x + 12.0 * t + 8.0 * t2 * t)
}

fn v2(x: f64, t: f64, transcription: Transcription) -> Complex64 {
    let (x2, t2) = (x * x, t * t);
    let first = match transcription {
        Transcription::AsPrinted => 8.0 * t2,
        Transcription::Corrected => 8.0 * t2 * t,
    };
    c(-1.0 - 8.0 * t * x - 8.0 * t2 * x2 - 4.0 * t2 * t2 - 4.0 * x2 * x2)
        + I * (first + 4.0 * t + 8.0 * t * x2 - 8.0 * t2 * x - 8.0 * x2 * x - 4.0 * x)
}

/// First-order rogue wave on a = −2, c = 1. `Corrected` reads the `8it²`
/// term of v₂ as `8it³`.
pub fn rogue1(transcription: Transcription) -> CatalogEntry {
    let formula: Formula = Arc::new(move |x, t| Fraction {
        num: -v1(x, t) * (-I * (2.0 * x + t)).exp(),
        den: v2(x, t, transcription),
    });
    CatalogEntry {
        name: "rogue1",
        params: Vec::new(),
        transcription,
        seed: printed_plane_wave(),
        formula,
    }
}

fn v3(x: f64, t: f64) -> Complex64 {
    let p = |n: i32| x.powi(n);
    let q = |n: i32| t.powi(n);
    c(-72.0 * x * t + 48.0 * p(3) * t - 216.0 * p(2) * q(2)
        + 24.0 * p(2) * q(4)
        + 24.0 * p(4) * q(2)
        + 90.0 * p(2)
        + 666.0 * q(2)
        - 12.0 * p(4)
        + 180.0 * q(4)
        + 8.0 * q(6)
        + 8.0 * p(6)
        + 48.0 * x * q(3)
        + 9.0)
        + I * (-48.0 * p(3) - 48.0 * p(3) * q(2) + 288.0 * x * q(2) - 54.0 * x - 24.0 * x * q(4)
            + 24.0 * q(5)
            + 24.0 * p(4) * t
            + 198.0 * t
            + 336.0 * q(3)
            + 48.0 * p(2) * q(3)
            - 24.0 * p(5))
}

fn v4(x: f64, t: f64, transcription: Transcription) -> Complex64 {
    let p = |n: i32| x.powi(n);
    let q = |n: i32| t.powi(n);
    let odd = match transcription {
        Transcription::AsPrinted => -288.0 * p(4) * t,
        Transcription::Corrected => -288.0 * p(2) * t,
    };
    c(198.0 * p(2) - 45.0 - 504.0 * x * t
        + 144.0 * p(3) * t
        + 504.0 * p(2) * q(2)
        + 144.0 * x * q(3)
        + 486.0 * q(2)
        + 60.0 * q(4)
        + 60.0 * p(4)
        - 24.0 * p(2) * q(4)
        - 8.0 * q(6)
        - 24.0 * p(4) * q(2)
        - 8.0 * p(6))
        + I * (-48.0 * p(3) + 24.0 * p(5) + 48.0 * p(3) * q(2) + 24.0 * x * q(4) + odd
            - 576.0 * x * q(2)
            + 144.0 * p(2) * q(3)
            - 90.0 * x
            - 414.0 * t
            + 72.0 * p(4) * t
            + 528.0 * q(3)
            + 72.0 * q(5))
}

fn v5(x: f64, t: f64) -> Complex64 {
    let p = |n: i32| x.powi(n);
    let q = |n: i32| t.powi(n);
    c(72.0 * x * t - 48.0 * p(3) * t + 216.0 * p(2) * q(2)
        - 24.0 * p(2) * q(4)
        - 90.0 * p(2)
        - 666.0 * q(2)
        + 12.0 * p(4)
        - 180.0 * q(4)
        - 8.0 * q(6)
        - 8.0 * p(6)
        - 48.0 * x * q(3)
        - 9.0
        - 24.0 * p(4) * q(2))
        + I * (-48.0 * p(3) - 48.0 * p(3) * q(2) + 288.0 * x * q(2)
            - 54.0 * x
            - 24.0 * x * q(4)
            - 24.0 * p(5)
            + 24.0 * q(5)
            + 24.0 * p(4) * t
            + 198.0 * t
            + 336.0 * q(3)
            + 48.0 * p(2) * q(3))
}

/// Second-order rogue wave on a = −2, c = 1. `Corrected` reads the `−288ix⁴t`
/// term of v₄ as `−288ix²t`.
pub fn rogue2(transcription: Transcription) -> CatalogEntry {
    let formula: Formula = Arc::new(move |x, t| {
        let d = v5(x, t);
        Fraction {
            num: -v3(x, t) * v4(x, t, transcription) * (-I * (2.0 * x + t)).exp(),
            den: d * d,
        }
    });
    CatalogEntry {
        name: "rogue2",
        params: Vec::new(),
        transcription,
        seed: printed_plane_wave(),
        formula,
    }
}

/// Peak intensity of the second-order rogue wave at the origin,
/// `(|v₃|·|v₄|/|v₅|²)² = (9·45/81)² = 25`.
pub const ROGUE2_CENTER_INTENSITY: f64 = 25.0;

/// Peak intensity of the first-order rogue wave at the origin, `(3/1)²`.
pub const ROGUE1_CENTER_INTENSITY: f64 = 9.0;

/// Every entry with its figure parameters.
pub fn figure_entries(transcription: Transcription) -> Vec<CatalogEntry> {
    vec![
        one_soliton(1.0, 2.0, 1.0, 1.0, 1.0, transcription).expect("figure parameters"),
        two_soliton(0.7, 0.3, 0.5, 0.5, 1.0, transcription).expect("figure parameters"),
        positon(0.8, 0.8, transcription).expect("figure parameters"),
        breather(transcription),
        rogue1(transcription),
        rogue2(transcription),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_constant_terms() {
        assert_eq!(v1(0.0, 0.0), c(3.0));
        assert_eq!(v2(0.0, 0.0, Transcription::AsPrinted), c(-1.0));
        assert_eq!(v3(0.0, 0.0), c(9.0));
        assert_eq!(v4(0.0, 0.0, Transcription::AsPrinted), c(-45.0));
        assert_eq!(v5(0.0, 0.0), c(-9.0));
    }

    #[test]
    fn rogue_centres() {
        for tr in [Transcription::AsPrinted, Transcription::Corrected] {
            assert!((rogue1(tr).eval(0.0, 0.0).norm_sqr() - 9.0).abs() < 1e-12);
            assert!((rogue2(tr).eval(0.0, 0.0).norm_sqr() - 25.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(one_soliton(1.0, 0.0, 1.0, 1.0, 1.0, Transcription::Corrected).is_err());
        assert!(two_soliton(0.7, 0.3, 0.7, 0.3, 1.0, Transcription::Corrected).is_err());
        assert!(positon(0.0, 0.8, Transcription::Corrected).is_err());
        assert!(one_soliton(1.0, 2.0, -1.0, 1.0, 1.0, Transcription::Corrected).is_err());
    }

    #[test]
    fn pole_detection() {
        let f = Fraction {
            num: c(1.0),
            den: c(1e-13),
        };
        assert!(f.is_pole());
        assert!(Fraction {
            num: c(0.0),
            den: c(0.0)
        }
        .is_pole());
        assert!(!Fraction {
            num: c(1.0),
            den: c(1e-11)
        }
        .is_pole());
    }

    #[test]
    fn deterministic() {
        for e in figure_entries(Transcription::Corrected) {
            let a = e.eval(0.37, -1.21);
            let b = e.eval(0.37, -1.21);
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
