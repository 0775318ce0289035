//! Seeds, the gauge function, the Lax pair and eigenfunctions of both seeds.
//!
//! Conventions (checked by the residual tests):
//!
//! * `U = -i(λ²/4)σ₃ + (i/2)λ√α·offdiag(R e^{-iθ}, Q e^{iθ})`
//! * `V = i(λ⁴/8 − (α/4)λ²QR)σ₃ + i·offdiag(G̃, G)` where
//!   `G = (λ/4)√α e^{iθ}(−λ²Q + 2iQₓ − 2θₓQ + 2αQ²R)` and `G̃` is its
//!   R-analogue `(λ/4)√α e^{-iθ}(−λ²R − 2iRₓ − 2θₓR + 2αR²Q)`.
//! * The physical reduction is `R = −Q*`.

use crate::numerics::{sample, ComplexField2D, ComplexMatrix, Grid2D, NumericsError, Scalar};
use crate::verify::{ConventionVariant, NonlinearSign, NormEntry, ResidualReport, VConjugation};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaxError {
    #[error("coupling alpha must be nonzero")]
    ZeroCoupling,
    #[error("plane-wave eigenfunctions need a nonzero amplitude c")]
    ZeroAmplitude,
    #[error("amplitude c must be finite and non-negative, got {0}")]
    InvalidAmplitude(f64),
    #[error("eigenvalue must be nonzero")]
    ZeroEigenvalue,
    #[error("plane-wave eigenfunctions require alpha > 0, got {0}")]
    UnsupportedCoupling(f64),
    #[error("operation requires a plane-wave seed")]
    NotPlaneWave,
    #[error("Newton iteration for s(lambda) = 0 did not converge")]
    NoCriticalEigenvalue,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Affine gauge θ = p·x + q·t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub p: f64,
    pub q: f64,
}

impl Theta {
    pub const fn new(p: f64, q: f64) -> Self {
        Theta { p, q }
    }

    #[inline]
    pub fn at(&self, x: f64, t: f64) -> f64 {
        self.p * x + self.q * t
    }
}

impl Default for Theta {
    fn default() -> Self {
        Theta::new(1.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedKind {
    Zero,
    PlaneWave { a: f64, b: f64, c: f64 },
}

/// Background solution fed to the Darboux transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub kind: SeedKind,
    pub alpha: f64,
    pub theta: Theta,
}

/// Values and derivatives of a field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub q: Complex64,
    pub qx: Complex64,
    pub qxx: Complex64,
    pub qt: Complex64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        q: Complex64::new(0.0, 0.0),
        qx: Complex64::new(0.0, 0.0),
        qxx: Complex64::new(0.0, 0.0),
        qt: Complex64::new(0.0, 0.0),
    };
}

/// Frequency b fixed by the plane-wave constraint.
///
/// For θ = x + t this is `b = −αc²a − 2 − a² − 2a − αc²`; for a general
/// affine θ the gauged wavenumber `a + p` and frequency `b + q` obey
/// `b + q = −(a+p)² − αc²(a+p)`.
pub fn plane_wave_frequency(a: f64, c: f64, alpha: f64, theta: Theta) -> f64 {
    if theta.p == 1.0 && theta.q == 1.0 {
        -alpha * c * c * a - 2.0 - a * a - 2.0 * a - alpha * c * c
    } else {
        let k = a + theta.p;
        -k * k - alpha * c * c * k - theta.q
    }
}

/// Plane-wave seed `Q = c·e^{i(ax+bt)}` with `b` derived from the constraint.
pub fn make_plane_wave_seed(
    a: f64,
    c: f64,
    alpha: f64,
    theta_p: f64,
    theta_q: f64,
) -> Result<Seed, LaxError> {
    if alpha == 0.0 {
        return Err(LaxError::ZeroCoupling);
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(LaxError::InvalidAmplitude(c));
    }
    let theta = Theta::new(theta_p, theta_q);
    let b = plane_wave_frequency(a, c, alpha, theta);
    Ok(Seed {
        kind: SeedKind::PlaneWave { a, b, c },
        alpha,
        theta,
    })
}

impl Seed {
    pub fn zero(alpha: f64, theta_p: f64, theta_q: f64) -> Result<Seed, LaxError> {
        if alpha == 0.0 {
            return Err(LaxError::ZeroCoupling);
        }
        Ok(Seed {
            kind: SeedKind::Zero,
            alpha,
            theta: Theta::new(theta_p, theta_q),
        })
    }

    pub fn is_plane_wave(&self) -> bool {
        matches!(self.kind, SeedKind::PlaneWave { .. })
    }

    /// Principal square root of α (imaginary for α < 0).
    pub fn sqrt_alpha(&self) -> Complex64 {
        Complex64::new(self.alpha, 0.0).sqrt()
    }

    pub fn value(&self, x: f64, t: f64) -> Complex64 {
        self.value_s(x, t)
    }

    pub fn value_s<T: Scalar>(&self, x: f64, t: f64) -> T {
        match self.kind {
            SeedKind::Zero => T::zero(),
            SeedKind::PlaneWave { a, b, c } => {
                let phase = T::from_f64(a) * T::from_f64(x) + T::from_f64(b) * T::from_f64(t);
                (T::i() * phase).exp().scale(c)
            }
        }
    }

    pub fn jet(&self, x: f64, t: f64) -> Jet {
        match self.kind {
            SeedKind::Zero => Jet::ZERO,
            SeedKind::PlaneWave { a, b, .. } => {
                let q = self.value(x, t);
                let i = Complex64::new(0.0, 1.0);
                Jet {
                    q,
                    qx: i * a * q,
                    qxx: -a * a * q,
                    qt: i * b * q,
                }
            }
        }
    }

    /// Wavenumber and amplitude entering the plane-wave eigenfunctions.
    ///
    /// The spectral problem only sees `√α·Q e^{iθ}`, so the printed θ = x + t
    /// formulas are evaluated at `a + p − 1` with amplitude `c√α`.
    fn spectral_background(&self) -> Result<(f64, f64), LaxError> {
        match self.kind {
            SeedKind::Zero => Err(LaxError::NotPlaneWave),
            SeedKind::PlaneWave { a, c, .. } => {
                if self.alpha <= 0.0 {
                    return Err(LaxError::UnsupportedCoupling(self.alpha));
                }
                Ok((a + self.theta.p - 1.0, c * self.alpha.sqrt()))
            }
        }
    }
}

/// Phase polynomial S(ε) = S₀ + S₁ε + S₂ε².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePolynomial {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
}

impl PhasePolynomial {
    pub const fn new(s0: f64, s1: f64, s2: f64) -> Self {
        PhasePolynomial { s0, s1, s2 }
    }

    pub fn eval<T: Scalar>(&self, e: T) -> T {
        T::from_f64(self.s0) + e * (T::from_f64(self.s1) + e * T::from_f64(self.s2))
    }
}

/// Eigenvalue stored as `base·(1 + rel)` so that tiny perturbations keep
/// their full precision in extended arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub base: Complex64,
    pub rel: Complex64,
}

impl Eigenvalue {
    pub fn new(lambda: Complex64) -> Self {
        Eigenvalue {
            base: lambda,
            rel: Complex64::new(0.0, 0.0),
        }
    }

    pub fn perturbed(base: Complex64, rel: Complex64) -> Self {
        Eigenvalue { base, rel }
    }

    pub fn value(&self) -> Complex64 {
        self.base * (1.0 + self.rel)
    }

    pub fn value_s<T: Scalar>(&self) -> T {
        if self.rel == Complex64::new(0.0, 0.0) {
            T::from_c64(self.base)
        } else {
            T::from_c64(self.base) * (T::one() + T::from_c64(self.rel))
        }
    }

    pub fn conj(&self) -> Self {
        Eigenvalue {
            base: self.base.conj(),
            rel: self.rel.conj(),
        }
    }
}

/// Which exponent sign the zero-seed eigenfunction uses in its t-dependence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSeedConvention {
    /// `φ = exp(−iλ²x/4 + iλ⁴t/8)`, consistent with V.
    #[default]
    LaxConsistent,
    /// `φ = exp(−(i/8)(2λ²x + λ⁴t))`.
    AsPrinted,
}

/// Superposition weights of the plane-wave eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Weights {
    Fixed {
        d1: Complex64,
        d2: Complex64,
    },
    /// `D₁ = exp(−i s S(e))`, `D₂ = exp(+i s S(e))` with `s = s(λ)`.
    Phase {
        poly: PhasePolynomial,
        e: Complex64,
    },
}

impl Weights {
    pub fn unit() -> Self {
        Weights::Fixed {
            d1: Complex64::new(1.0, 0.0),
            d2: Complex64::new(1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    ZeroSeed {
        convention: ZeroSeedConvention,
    },
    PlaneWaveSeed {
        a: f64,
        c: f64,
        weights: Weights,
    },
    /// `(φ, ϕ) = (ϕ̃*, φ̃*)` of the partner datum, eigenvalue conjugated.
    Conjugate(Box<SpectralDatum>),
    Scaled {
        inner: Box<SpectralDatum>,
        factor: Complex64,
    },
}

/// Eigenvalue with its two-component eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDatum {
    pub lambda: Eigenvalue,
    pub provenance: Provenance,
}

impl SpectralDatum {
    pub fn lambda(&self) -> Complex64 {
        self.lambda.value()
    }

    /// Both components at (x, t) in the requested arithmetic.
    pub fn eval<T: Scalar>(&self, x: f64, t: f64) -> (T, T) {
        match &self.provenance {
            Provenance::ZeroSeed { convention } => {
                let l: T = self.lambda.value_s();
                let l2 = l * l;
                let (xs, ts) = (T::from_f64(x), T::from_f64(t));
                let arg = match convention {
                    ZeroSeedConvention::LaxConsistent => {
                        T::i() * (l2 * l2 * ts.scale(0.125) - l2 * xs.scale(0.25))
                    }
                    ZeroSeedConvention::AsPrinted => {
                        -(T::i() * (l2 * xs.scale(2.0) + l2 * l2 * ts).scale(0.125))
                    }
                };
                (arg.exp(), (-arg).exp())
            }
            Provenance::PlaneWaveSeed { a, c, weights } => {
                let l: T = self.lambda.value_s();
                let (d1, d2) = match weights {
                    Weights::Fixed { d1, d2 } => (T::from_c64(*d1), T::from_c64(*d2)),
                    Weights::Phase { poly, e } => {
                        let s = radicand_s(l, *a, *c).sqrt();
                        let arg = T::i() * s * poly.eval(T::from_c64(*e));
                        ((-arg).exp(), arg.exp())
                    }
                };
                plane_wave_components(l, *a, *c, d1, d2, x, t)
            }
            Provenance::Conjugate(inner) => {
                let (p, v) = inner.eval::<T>(x, t);
                (v.conj(), p.conj())
            }
            Provenance::Scaled { inner, factor } => {
                let (p, v) = inner.eval::<T>(x, t);
                let f = T::from_c64(*factor);
                (p * f, v * f)
            }
        }
    }

    pub fn phi(&self, x: f64, t: f64) -> Complex64 {
        self.eval::<Complex64>(x, t).0
    }

    pub fn varphi(&self, x: f64, t: f64) -> Complex64 {
        self.eval::<Complex64>(x, t).1
    }

    /// Partner under the reduction: eigenvalue λ*, eigenfunction (ϕ*, φ*).
    pub fn conjugate_partner(&self) -> SpectralDatum {
        SpectralDatum {
            lambda: self.lambda.conj(),
            provenance: Provenance::Conjugate(Box::new(self.clone())),
        }
    }

    /// Same datum with both components multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> SpectralDatum {
        SpectralDatum {
            lambda: self.lambda,
            provenance: Provenance::Scaled {
                inner: Box::new(self.clone()),
                factor,
            },
        }
    }
}

/// Zero-seed eigenfunction with the V-consistent exponent.
pub fn zero_seed_eigenfunction(lambda: Complex64) -> Result<SpectralDatum, LaxError> {
    zero_seed_eigenfunction_with(lambda, ZeroSeedConvention::LaxConsistent)
}

pub fn zero_seed_eigenfunction_with(
    lambda: Complex64,
    convention: ZeroSeedConvention,
) -> Result<SpectralDatum, LaxError> {
    zero_seed_datum(Eigenvalue::new(lambda), convention)
}

pub(crate) fn zero_seed_datum(
    lambda: Eigenvalue,
    convention: ZeroSeedConvention,
) -> Result<SpectralDatum, LaxError> {
    let v = lambda.value();
    if v == Complex64::new(0.0, 0.0) || !(v.re.is_finite() && v.im.is_finite()) {
        return Err(LaxError::ZeroEigenvalue);
    }
    Ok(SpectralDatum {
        lambda,
        provenance: Provenance::ZeroSeed { convention },
    })
}

/// Plane-wave eigenfunction `D₁f₁ + D₂f₂ + D₂f₁^⋆ + D₁f₂^⋆`.
pub fn plane_wave_eigenfunction(
    lambda: Complex64,
    seed: &Seed,
    weights: (Complex64, Complex64),
) -> Result<SpectralDatum, LaxError> {
    plane_wave_datum(
        Eigenvalue::new(lambda),
        seed,
        Weights::Fixed {
            d1: weights.0,
            d2: weights.1,
        },
    )
}

pub(crate) fn plane_wave_datum(
    lambda: Eigenvalue,
    seed: &Seed,
    weights: Weights,
) -> Result<SpectralDatum, LaxError> {
    let (a, c) = seed.spectral_background()?;
    if c == 0.0 {
        return Err(LaxError::ZeroAmplitude);
    }
    if lambda.value() == Complex64::new(0.0, 0.0) {
        return Err(LaxError::ZeroEigenvalue);
    }
    Ok(SpectralDatum {
        lambda,
        provenance: Provenance::PlaneWaveSeed { a, c, weights },
    })
}

fn radicand_s<T: Scalar>(l: T, a: f64, c: f64) -> T {
    let l2 = l * l;
    T::from_f64(4.0 * a * a + 8.0 * a + 4.0) - l2.scale(4.0 * a + 4.0 + 4.0 * c * c) + l2 * l2
}

/// Radicand `4a² − 4aλ² + 8a + λ⁴ − 4λ² + 4 − 4λ²c²` for the seed.
pub fn radicand(lambda: Complex64, seed: &Seed) -> Result<Complex64, LaxError> {
    let (a, c) = seed.spectral_background()?;
    Ok(radicand_s(lambda, a, c))
}

/// Branch quantity s(λ) on the principal branch.
pub fn branch_s(lambda: Complex64, seed: &Seed) -> Result<Complex64, LaxError> {
    Ok(radicand(lambda, seed)?.sqrt())
}

/// First-quadrant root of s(λ) = 0, by Newton iteration on the radicand as a
/// quadratic in μ = λ².
pub fn critical_eigenvalue(seed: &Seed, guess: Complex64) -> Result<Complex64, LaxError> {
    let (a, c) = seed.spectral_background()?;
    let b1 = 4.0 * a + 4.0 + 4.0 * c * c;
    let b0 = 4.0 * (a + 1.0) * (a + 1.0);
    let mut mu = guess * guess;
    for _ in 0..100 {
        let f = mu * mu - b1 * mu + b0;
        let df = 2.0 * mu - b1;
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        mu -= step;
        if step.norm() <= 1e-15 * mu.norm().max(1.0) {
            let l = mu.sqrt();
            let l = if l.re < 0.0 { -l } else { l };
            if l.norm() == 0.0 {
                return Err(LaxError::NoCriticalEigenvalue);
            }
            return Ok(l);
        }
    }
    Err(LaxError::NoCriticalEigenvalue)
}

fn pw_parts<T: Scalar>(l: T, s: T, a: f64, c: f64, x: f64, t: f64) -> ((T, T), (T, T)) {
    let xs = T::from_f64(x);
    let ts = T::from_f64(t);
    let l2 = l * l;
    let c2 = c * c;
    let tc = ts * T::from_f64(8.0 * a + 4.0 * a * a + 4.0 + 4.0 * c2 + 4.0 * c2 * a);
    let xc = xs * T::from_f64(4.0 * a + 4.0);
    let sx = s * xs.scale(2.0);
    let st = ts * s * (l2 + T::from_f64(2.0 * a + 2.0 + 2.0 * c2));
    let p = -xc - sx + st + tc;
    let m = xc - sx + st - tc;
    let i8 = T::i().scale(0.125);
    let base = T::from_f64(2.0 + 2.0 * a) - l2;
    let denom = l * T::from_f64(2.0 * c);
    let f1 = ((base - s) / denom * (i8 * p).exp(), (i8 * m).exp());
    let f2 = ((base + s) / denom * (-(i8 * m)).exp(), (-(i8 * p)).exp());
    (f1, f2)
}

fn plane_wave_components<T: Scalar>(l: T, a: f64, c: f64, d1: T, d2: T, x: f64, t: f64) -> (T, T) {
    let s = radicand_s(l, a, c).sqrt();
    let lb = l.conj();
    let sb = radicand_s(lb, a, c).sqrt();
    let (f1, f2) = pw_parts(l, s, a, c, x, t);
    let (g1, g2) = pw_parts(lb, sb, a, c, x, t);
    let phi = d1 * f1.0 + d2 * f2.0 + d2 * g1.1.conj() + d1 * g2.1.conj();
    let varphi = d1 * f1.1 + d2 * f2.1 + d2 * g1.0.conj() + d1 * g2.0.conj();
    (phi, varphi)
}

type M2 = [[Complex64; 2]; 2];

fn to_matrix(m: M2) -> ComplexMatrix {
    ComplexMatrix::new(2, vec![m[0][0], m[0][1], m[1][0], m[1][1]]).expect("2x2")
}

struct LaxParts {
    u: M2,
    v: M2,
    ut: M2,
    vx: M2,
}

fn lax_parts(
    alpha: f64,
    theta: Theta,
    lambda: Complex64,
    jet: &Jet,
    x: f64,
    t: f64,
    variant: ConventionVariant,
) -> LaxParts {
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let sgn = match variant.nonlinear_sign {
        NonlinearSign::Plus => 1.0,
        NonlinearSign::Minus => -1.0,
    };
    let (q, qx, qxx, qt) = (jet.q, jet.qx, jet.qxx, jet.qt);
    let r = -sgn * q.conj();
    let rx = -sgn * qx.conj();
    let rxx = -sgn * qxx.conj();
    let rt = -sgn * qt.conj();
    let beta = Complex64::new(alpha, 0.0).sqrt();
    let p = theta.p;
    let e = (i * theta.at(x, t)).exp();
    let ei = e.inv();
    let l = lambda;
    let l2 = l * l;

    let u = [
        [-i * l2 / 4.0, i / 2.0 * l * beta * r * ei],
        [i / 2.0 * l * beta * q * e, i * l2 / 4.0],
    ];
    let ut = [
        [zero, i / 2.0 * l * beta * (rt - i * theta.q * r) * ei],
        [i / 2.0 * l * beta * (qt + i * theta.q * q) * e, zero],
    ];

    let a_diag = i * (l2 * l2 / 8.0 - alpha / 4.0 * l2 * q * r);
    let a_diag_x = i * (-alpha / 4.0 * l2 * (qx * r + q * rx));
    let k = l / 4.0 * beta;
    let g_in = -l2 * q + 2.0 * i * qx - 2.0 * p * q + 2.0 * alpha * q * q * r;
    let g_in_x =
        -l2 * qx + 2.0 * i * qxx - 2.0 * p * qx + 2.0 * alpha * (2.0 * q * qx * r + q * q * rx);
    let g = k * e * g_in;
    let g_x = k * e * (i * p * g_in + g_in_x);
    let (v12, v12_x) = match variant.v_conjugation {
        VConjugation::GIndependent => {
            let h_in = -l2 * r - 2.0 * i * rx - 2.0 * p * r + 2.0 * alpha * r * r * q;
            let h_in_x = -l2 * rx - 2.0 * i * rxx - 2.0 * p * rx
                + 2.0 * alpha * (2.0 * r * rx * q + r * r * qx);
            let h = k * ei * h_in;
            let h_x = k * ei * (-i * p * h_in + h_in_x);
            (i * h, i * h_x)
        }
        VConjugation::GStar => (i * g.conj(), i * g_x.conj()),
    };
    let v = [[a_diag, v12], [i * g, -a_diag]];
    let vx = [[a_diag_x, v12_x], [i * g_x, -a_diag_x]];
    LaxParts { u, v, ut, vx }
}

fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// U and V at (x, t) for a field given as a closure; Qₓ by a central
/// difference with step `1e-4·max(1, |x|)`.
pub fn lax_matrices<F>(
    seed: &Seed,
    q_field: F,
    lambda: Complex64,
    x: f64,
    t: f64,
    variant: ConventionVariant,
) -> (ComplexMatrix, ComplexMatrix)
where
    F: Fn(f64, f64) -> Complex64,
{
    let h = 1e-4 * x.abs().max(1.0);
    let q = q_field(x, t);
    let jet = Jet {
        q,
        qx: (q_field(x + h, t) - q_field(x - h, t)) / (2.0 * h),
        qxx: Complex64::new(0.0, 0.0),
        qt: Complex64::new(0.0, 0.0),
    };
    let parts = lax_parts(seed.alpha, seed.theta, lambda, &jet, x, t, variant);
    (to_matrix(parts.u), to_matrix(parts.v))
}

/// U and V from an exact jet of the field.
pub fn lax_matrices_from_jet(
    seed: &Seed,
    jet: &Jet,
    lambda: Complex64,
    x: f64,
    t: f64,
    variant: ConventionVariant,
) -> (ComplexMatrix, ComplexMatrix) {
    let parts = lax_parts(seed.alpha, seed.theta, lambda, jet, x, t, variant);
    (to_matrix(parts.u), to_matrix(parts.v))
}

/// Max entry modulus of `U_t − V_x + [U, V]` on the seed's analytic jet.
pub fn zero_curvature_residual(
    seed: &Seed,
    lambda: Complex64,
    variant: ConventionVariant,
    x: f64,
    t: f64,
) -> f64 {
    let jet = seed.jet(x, t);
    let LaxParts { u, v, ut, vx } = lax_parts(seed.alpha, seed.theta, lambda, &jet, x, t, variant);
    let uv = mat_mul(&u, &v);
    let vu = mat_mul(&v, &u);
    let mut worst = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            worst = worst.max((ut[r][c] - vx[r][c] + uv[r][c] - vu[r][c]).norm());
        }
    }
    worst
}

/// Residuals of `Φₓ = UΦ` and `Φₜ = VΦ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaxResidualReport {
    pub x_equation: ResidualReport,
    pub t_equation: ResidualReport,
}

/// Finite-difference check of both Lax equations on `grid` and its
/// refinement, with U and V built from the seed's exact jet.
pub fn check_lax_residual(
    datum: &SpectralDatum,
    seed: &Seed,
    grid: &Grid2D,
    variant: ConventionVariant,
) -> Result<LaxResidualReport, LaxError> {
    if grid.nx < 5 || grid.nt < 5 {
        return Err(LaxError::Numerics(NumericsError::GridTooSmall {
            needed: 5,
            got: grid.nx.min(grid.nt),
        }));
    }
    let lambda = datum.lambda();
    let mut xs = Vec::new();
    let mut ts = Vec::new();
    let mut g = *grid;
    for _ in 0..2 {
        let phi = sample(|x, t| datum.phi(x, t), &g);
        let varphi = sample(|x, t| datum.varphi(x, t), &g);
        let (ex, et) = lax_norms(&phi, &varphi, seed, lambda, variant);
        xs.push(NormEntry {
            h: g.hx(),
            max_residual: ex.0,
            mean_residual: ex.1,
        });
        ts.push(NormEntry {
            h: g.hx(),
            max_residual: et.0,
            mean_residual: et.1,
        });
        g = g.refined();
    }
    let window = grid.shrink(1).unwrap_or(*grid);
    Ok(LaxResidualReport {
        x_equation: ResidualReport::from_norms(variant, xs, window),
        t_equation: ResidualReport::from_norms(variant, ts, window),
    })
}

type Norm = (f64, f64);

fn lax_norms(
    phi: &ComplexField2D,
    varphi: &ComplexField2D,
    seed: &Seed,
    lambda: Complex64,
    variant: ConventionVariant,
) -> (Norm, Norm) {
    let g = phi.grid;
    let (hx, ht) = (g.hx(), g.ht());
    let mut mx = (0.0f64, 0.0f64);
    let mut mt = (0.0f64, 0.0f64);
    let mut count = 0usize;
    for j in 1..g.nt - 1 {
        for i in 1..g.nx - 1 {
            let (x, t) = (g.x(i), g.t(j));
            let (u, v) = lax_matrices_from_jet(seed, &seed.jet(x, t), lambda, x, t, variant);
            let psi = [phi.at(i, j), varphi.at(i, j)];
            let psi_x = [
                (phi.at(i + 1, j) - phi.at(i - 1, j)) / (2.0 * hx),
                (varphi.at(i + 1, j) - varphi.at(i - 1, j)) / (2.0 * hx),
            ];
            let psi_t = [
                (phi.at(i, j + 1) - phi.at(i, j - 1)) / (2.0 * ht),
                (varphi.at(i, j + 1) - varphi.at(i, j - 1)) / (2.0 * ht),
            ];
            let up = u.mul_vec(&psi);
            let vp = v.mul_vec(&psi);
            let rx = ((psi_x[0] - up[0]).norm_sqr() + (psi_x[1] - up[1]).norm_sqr()).sqrt();
            let rt = ((psi_t[0] - vp[0]).norm_sqr() + (psi_t[1] - vp[1]).norm_sqr()).sqrt();
            if rx.is_finite() && rt.is_finite() {
                mx.0 = mx.0.max(rx);
                mx.1 += rx;
                mt.0 = mt.0.max(rt);
                mt.1 += rt;
                count += 1;
            }
        }
    }
    let n = count.max(1) as f64;
    ((mx.0, mx.1 / n), (mt.0, mt.1 / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plane_wave_frequency_examples() {
        let s = make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(s.kind, SeedKind::PlaneWave { b, .. } if b == -1.0));
        let s = make_plane_wave_seed(0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(s.kind, SeedKind::PlaneWave { b, .. } if b == -2.0));
        let s = make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.value(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(
            make_plane_wave_seed(1.0, 1.0, 0.0, 1.0, 1.0),
            Err(LaxError::ZeroCoupling)
        );
    }

    #[test]
    fn zero_seed_values() {
        let d = zero_seed_eigenfunction_with(c(1.0, 2.0), ZeroSeedConvention::AsPrinted).unwrap();
        assert_eq!(d.phi(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(d.varphi(0.0, 0.0), c(1.0, 0.0));
        let expected = c(1.0, 0.75).exp();
        assert!((d.phi(1.0, 0.0) - expected).norm() < 1e-14);
        // both conventions agree at t = 0
        let e = zero_seed_eigenfunction(c(1.0, 2.0)).unwrap();
        assert!((e.phi(1.0, 0.0) - expected).norm() < 1e-14);
        assert_eq!(
            zero_seed_eigenfunction(c(0.0, 0.0)),
            Err(LaxError::ZeroEigenvalue)
        );
    }

    #[test]
    fn s_examples() {
        let seed = make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let l = c(0.3, -0.7);
        let expected = (l.powu(4) + 4.0).sqrt();
        assert!((branch_s(l, &seed).unwrap() - expected).norm() < 1e-14);
        assert!(branch_s(c(1.0, 1.0), &seed).unwrap().norm() < 1e-14);
        let lc = critical_eigenvalue(&seed, c(0.9, 1.2)).unwrap();
        assert!((lc - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_seed_lax_matrices() {
        let seed = Seed::zero(1.0, 1.0, 1.0).unwrap();
        let l = c(1.0, 2.0);
        let (u, v) = lax_matrices(
            &seed,
            |_, _| c(0.0, 0.0),
            l,
            0.3,
            0.2,
            ConventionVariant::CANONICAL,
        );
        let i = c(0.0, 1.0);
        assert_eq!(u.get(0, 0), -i * l * l / 4.0);
        assert_eq!(u.get(0, 1), c(0.0, 0.0));
        assert_eq!(v.get(0, 0), i * l.powu(4) / 8.0);
        assert_eq!(v.get(1, 1), -i * l.powu(4) / 8.0);
    }

    #[test]
    fn plane_wave_u_off_diagonal() {
        let seed = make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let (u, _) = lax_matrices(
            &seed,
            |x, t| seed.value(x, t),
            c(1.0, 1.0),
            0.0,
            0.0,
            ConventionVariant::CANONICAL,
        );
        assert!((u.get(0, 1).norm() - 2f64.sqrt() / 2.0).abs() < 1e-14);
        assert!((u.get(1, 0).norm() - 2f64.sqrt() / 2.0).abs() < 1e-14);
    }
}
