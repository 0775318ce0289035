//! One-fold and determinant-form n-fold Darboux transformations.

use crate::lax::{
    branch_s, plane_wave_datum, zero_seed_datum, Eigenvalue, LaxError, PhasePolynomial, Seed,
    SpectralDatum, Weights, ZeroSeedConvention,
};
use crate::numerics::{det_in_place, sample, CDd, ComplexField2D, Grid2D, Precision, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DarbouxError {
    #[error("spectral set must have even length 2n with 1 <= n <= 3, got {0}")]
    BadSetLength(usize),
    #[error("eigenvalue {0} is real or purely imaginary; its conjugate pair degenerates")]
    DegeneratePair(Complex64),
    #[error("eigenvalue {0} is a branch point s(lambda) = 0; the eigenfunction pair is linearly dependent")]
    BranchPoint(Complex64),
    #[error("eigenvalues must be pairwise distinct")]
    RepeatedEigenvalue,
    #[error("transformation denominator vanishes at (x, t) = ({x}, {t})")]
    DenominatorVanishes { x: f64, t: f64 },
    #[error("Omega determinant vanishes at (x, t) = ({x}, {t})")]
    SingularOmega { x: f64, t: f64 },
    #[error("condition estimate {estimate:.3e} exceeds bound at (x, t) = ({x}, {t})")]
    ConditionBlowup { x: f64, t: f64, estimate: f64 },
    #[error("invalid degeneration spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Lax(#[from] LaxError),
}

/// Ordered eigenvalue/eigenfunction data for an n-fold transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSet {
    pub data: Vec<SpectralDatum>,
    pub reduction: bool,
}

impl SpectralSet {
    pub fn new(data: Vec<SpectralDatum>, reduction: bool) -> Result<Self, DarbouxError> {
        let len = data.len();
        if len == 0 || !len.is_multiple_of(2) || len > 6 {
            return Err(DarbouxError::BadSetLength(len));
        }
        let lams: Vec<Complex64> = data.iter().map(|d| d.lambda()).collect();
        for (i, a) in lams.iter().enumerate() {
            if a.norm() == 0.0 {
                return Err(DarbouxError::Lax(LaxError::ZeroEigenvalue));
            }
            if lams[i + 1..].iter().any(|b| b == a) {
                return Err(DarbouxError::RepeatedEigenvalue);
            }
        }
        Ok(SpectralSet { data, reduction })
    }

    /// Number of folds n.
    pub fn order(&self) -> usize {
        self.data.len() / 2
    }

    /// Same set with every eigenfunction multiplied by one common constant.
    pub fn rescaled(&self, factor: Complex64) -> SpectralSet {
        SpectralSet {
            data: self.data.iter().map(|d| d.scaled(factor)).collect(),
            reduction: self.reduction,
        }
    }
}

/// Arithmetic and conditioning policy for evaluating a transformation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DtConfig {
    /// `None` selects double, or extended for degenerate limits with ε ≤ 1e-3.
    pub precision: Option<Precision>,
    /// `None` selects 1e12 in double and 1e28 in extended arithmetic.
    pub condition_bound: Option<f64>,
}

impl DtConfig {
    pub fn with_precision(precision: Precision) -> Self {
        DtConfig {
            precision: Some(precision),
            condition_bound: None,
        }
    }
}

/// Precision chosen automatically for a degeneration radius.
pub fn auto_precision(epsilon: f64) -> Precision {
    if epsilon <= 1e-3 {
        Precision::Extended
    } else {
        Precision::Double
    }
}

fn default_bound(p: Precision) -> f64 {
    match p {
        Precision::Double => 1e12,
        Precision::Extended => 1e28,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    OneFold,
    NFold,
}

/// A transformed solution, evaluated lazily at any (x, t).
#[derive(Debug, Clone)]
pub struct DTOutput {
    set: SpectralSet,
    seed: Seed,
    method: Method,
    precision: Precision,
    bound: f64,
}

struct Omegas<T> {
    o11: T,
    o12: T,
    o21: T,
    o22: T,
    ratio: f64,
}

impl DTOutput {
    fn new(
        set: SpectralSet,
        seed: Seed,
        method: Method,
        precision: Precision,
        bound: Option<f64>,
    ) -> Self {
        DTOutput {
            set,
            seed,
            method,
            precision,
            bound: bound.unwrap_or_else(|| default_bound(precision)),
        }
    }

    pub fn set(&self) -> &SpectralSet {
        &self.set
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn condition_bound(&self) -> f64 {
        self.bound
    }

    /// New solution Q at (x, t).
    pub fn eval(&self, x: f64, t: f64) -> Result<Complex64, DarbouxError> {
        match (self.method, self.precision) {
            (Method::OneFold, Precision::Double) => self.one_fold_at::<Complex64>(x, t),
            (Method::OneFold, Precision::Extended) => self.one_fold_at::<CDd>(x, t),
            (Method::NFold, Precision::Double) => self.n_fold_at::<Complex64>(x, t).map(|v| v.0),
            (Method::NFold, Precision::Extended) => self.n_fold_at::<CDd>(x, t).map(|v| v.0),
        }
    }

    /// Q at (x, t), or NaN where the evaluation fails.
    pub fn q_new(&self, x: f64, t: f64) -> Complex64 {
        self.eval(x, t)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    /// Companion field R from its own determinant formula.
    pub fn companion_r(&self, x: f64, t: f64) -> Result<Complex64, DarbouxError> {
        match self.precision {
            Precision::Double => self.n_fold_at::<Complex64>(x, t).map(|v| v.1),
            Precision::Extended => self.n_fold_at::<CDd>(x, t).map(|v| v.1),
        }
    }

    /// Largest over smallest pivot modulus in the elimination of Ω₁₁.
    pub fn condition_estimate(&self, x: f64, t: f64) -> f64 {
        let r = match self.precision {
            Precision::Double => self.omegas::<Complex64>(x, t).map(|o| o.ratio),
            Precision::Extended => self.omegas::<CDd>(x, t).map(|o| o.ratio),
        };
        r.unwrap_or(f64::INFINITY)
    }

    /// Samples Q over `grid`, flagging nodes where evaluation fails.
    pub fn sample(&self, grid: &Grid2D) -> ComplexField2D {
        sample(|x, t| self.q_new(x, t), grid)
    }

    fn one_fold_at<T: Scalar>(&self, x: f64, t: f64) -> Result<Complex64, DarbouxError> {
        let d1 = &self.set.data[0];
        let d2 = &self.set.data[1];
        let l1: T = d1.lambda.value_s();
        let l2: T = d2.lambda.value_s();
        let (p1, v1) = d1.eval::<T>(x, t);
        let (p2, v2) = d2.eval::<T>(x, t);
        let den_a = p1 * v2 * l1 - v1 * p2 * l2;
        let den_c = p1 * v2 * l2 - v1 * p2 * l1;
        let scale = (p1 * v2 * l1).modulus() + (v1 * p2 * l2).modulus();
        let tiny = 1e-14 * scale;
        if !(den_a.modulus() > tiny && den_c.modulus() > tiny) {
            return Err(DarbouxError::DenominatorVanishes { x, t });
        }
        let a2 = (v1 * p2 * l1 - p1 * v2 * l2) / den_a;
        if a2.modulus().is_nan() || a2.modulus() <= 0.0 {
            return Err(DarbouxError::DenominatorVanishes { x, t });
        }
        let d2c = T::one() / a2;
        let c1 = v1 * v2 * (l1 * l1 - l2 * l2) / den_c;
        let q0: T = self.seed.value_s(x, t);
        let gauge = (-(T::i() * theta_s::<T>(&self.seed, x, t))).exp();
        let beta = T::from_c64(self.seed.sqrt_alpha());
        let q = d2c / a2 * q0 - c1 * gauge / (a2 * beta);
        finite(q.to_c64(), x, t)
    }

    fn omegas<T: Scalar>(&self, x: f64, t: f64) -> Result<Omegas<T>, DarbouxError> {
        let n2 = self.set.data.len();
        let mut lam = Vec::with_capacity(n2);
        let mut phi = Vec::with_capacity(n2);
        let mut varphi = Vec::with_capacity(n2);
        for d in &self.set.data {
            let (p, v) = d.eval::<T>(x, t);
            // row equilibration: every Ω row j carries the same factor, so
            // all determinant ratios are unchanged
            let m = p.modulus().max(v.modulus());
            if !(m.is_finite() && m > 0.0) {
                return Err(DarbouxError::SingularOmega { x, t });
            }
            lam.push(d.lambda.value_s::<T>());
            phi.push(p.scale(1.0 / m));
            varphi.push(v.scale(1.0 / m));
        }
        let mut pows = vec![T::one(); n2 * (n2 + 1)];
        for j in 0..n2 {
            for k in 1..=n2 {
                pows[j * (n2 + 1) + k] = pows[j * (n2 + 1) + k - 1] * lam[j];
            }
        }
        let pw = |j: usize, k: usize| pows[j * (n2 + 1) + k];
        let build = |which: u8| {
            let mut m = Vec::with_capacity(n2 * n2);
            for j in 0..n2 {
                for k in 0..n2 {
                    let e = n2 - 1 - k;
                    let even = k % 2 == 0;
                    let v = match which {
                        11 => pw(j, e) * if even { varphi[j] } else { phi[j] },
                        21 => pw(j, e) * if even { phi[j] } else { varphi[j] },
                        22 if k == 0 => pw(j, n2) * varphi[j],
                        22 => pw(j, e) * if even { phi[j] } else { varphi[j] },
                        _ if k == 0 => pw(j, n2) * phi[j],
                        _ => pw(j, e) * if even { varphi[j] } else { phi[j] },
                    };
                    m.push(v);
                }
            }
            m
        };
        let e11 = det_in_place(&mut build(11), n2);
        let e12 = det_in_place(&mut build(12), n2);
        let e21 = det_in_place(&mut build(21), n2);
        let e22 = det_in_place(&mut build(22), n2);
        Ok(Omegas {
            o11: e11.det,
            o12: e12.det,
            o21: e21.det,
            o22: e22.det,
            ratio: e11.pivot_ratio,
        })
    }

    fn n_fold_at<T: Scalar>(&self, x: f64, t: f64) -> Result<(Complex64, Complex64), DarbouxError> {
        let o = self.omegas::<T>(x, t)?;
        if [o.o11.modulus(), o.o21.modulus()]
            .iter()
            .any(|m| m.is_nan() || *m <= 0.0)
        {
            return Err(DarbouxError::SingularOmega { x, t });
        }
        if o.ratio > self.bound {
            return Err(DarbouxError::ConditionBlowup {
                x,
                t,
                estimate: o.ratio,
            });
        }
        let q0: T = self.seed.value_s(x, t);
        let r0 = -q0.conj();
        let th = theta_s::<T>(&self.seed, x, t);
        let beta = T::from_c64(self.seed.sqrt_alpha());
        let ratio = o.o21 / o.o11;
        let q =
            ratio * ratio * q0 + (-(T::i() * th)).exp() / beta * (o.o21 / o.o11) * (o.o22 / o.o11);
        let inv = o.o11 / o.o21;
        let r = inv * inv * r0 - (T::i() * th).exp() / beta * (o.o11 / o.o21) * (o.o12 / o.o21);
        Ok((finite(q.to_c64(), x, t)?, finite(r.to_c64(), x, t)?))
    }
}

fn theta_s<T: Scalar>(seed: &Seed, x: f64, t: f64) -> T {
    T::from_f64(seed.theta.p) * T::from_f64(x) + T::from_f64(seed.theta.q) * T::from_f64(t)
}

fn finite(z: Complex64, x: f64, t: f64) -> Result<Complex64, DarbouxError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(DarbouxError::SingularOmega { x, t })
    }
}

/// One-fold transformation from the explicit a₂, c₁ elements.
pub fn one_fold(set: &SpectralSet, seed: &Seed) -> Result<DTOutput, DarbouxError> {
    one_fold_with(set, seed, DtConfig::default())
}

pub fn one_fold_with(
    set: &SpectralSet,
    seed: &Seed,
    config: DtConfig,
) -> Result<DTOutput, DarbouxError> {
    if set.data.len() != 2 {
        return Err(DarbouxError::BadSetLength(set.data.len()));
    }
    let p = config.precision.unwrap_or(Precision::Double);
    Ok(DTOutput::new(
        set.clone(),
        *seed,
        Method::OneFold,
        p,
        config.condition_bound,
    ))
}

/// Determinant-form n-fold transformation.
pub fn n_fold(set: &SpectralSet, seed: &Seed) -> Result<DTOutput, DarbouxError> {
    n_fold_with(set, seed, DtConfig::default())
}

pub fn n_fold_with(
    set: &SpectralSet,
    seed: &Seed,
    config: DtConfig,
) -> Result<DTOutput, DarbouxError> {
    let len = set.data.len();
    if len == 0 || !len.is_multiple_of(2) || len > 6 {
        return Err(DarbouxError::BadSetLength(len));
    }
    let p = config.precision.unwrap_or(Precision::Double);
    Ok(DTOutput::new(
        set.clone(),
        *seed,
        Method::NFold,
        p,
        config.condition_bound,
    ))
}

fn check_pair(l: Complex64) -> Result<(), DarbouxError> {
    if l.re == 0.0 || l.im == 0.0 || !(l.re.is_finite() && l.im.is_finite()) {
        return Err(DarbouxError::DegeneratePair(l));
    }
    Ok(())
}

fn reduced_from(
    entries: Vec<(Eigenvalue, Weights)>,
    seed: &Seed,
) -> Result<SpectralSet, DarbouxError> {
    let mut data = Vec::with_capacity(2 * entries.len());
    for (lam, w) in entries {
        check_pair(lam.value())?;
        let d = if seed.is_plane_wave() {
            plane_wave_datum(lam, seed, w)?
        } else {
            zero_seed_datum(lam, ZeroSeedConvention::LaxConsistent)?
        };
        let partner = d.conjugate_partner();
        data.push(d);
        data.push(partner);
    }
    SpectralSet::new(data, true)
}

/// Conjugate-pair set `(λ, λ*)` with eigenfunctions `(φ, ϕ)`, `(ϕ*, φ*)`.
///
/// For the zero seed the weights are ignored.
pub fn build_reduced_set(
    lambdas: &[Complex64],
    seed: &Seed,
    weights_per_lambda: &[(Complex64, Complex64)],
) -> Result<SpectralSet, DarbouxError> {
    if lambdas.len() != weights_per_lambda.len() {
        return Err(DarbouxError::InvalidSpec(format!(
            "{} eigenvalues but {} weight pairs",
            lambdas.len(),
            weights_per_lambda.len()
        )));
    }
    let mut entries = Vec::with_capacity(lambdas.len());
    for (&l, &(d1, d2)) in lambdas.iter().zip(weights_per_lambda) {
        check_pair(l)?;
        if seed.is_plane_wave() {
            let s = branch_s(l, seed)?;
            if s.norm() < 1e-10 * l.norm().max(1.0).powi(2) {
                return Err(DarbouxError::BranchPoint(l));
            }
        }
        entries.push((Eigenvalue::new(l), Weights::Fixed { d1, d2 }));
    }
    reduced_from(entries, seed)
}

/// Critical eigenvalue, perturbation radius, order and phase polynomial of a
/// numerically degenerated transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationSpec {
    pub lambda_c: Complex64,
    pub epsilon: f64,
    pub n: usize,
    pub phases: PhasePolynomial,
    pub offsets: Vec<Complex64>,
}

impl DegenerationSpec {
    /// Offsets are the n-th roots of unity.
    pub fn new(lambda_c: Complex64, epsilon: f64, n: usize, phases: PhasePolynomial) -> Self {
        let offsets = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        DegenerationSpec {
            lambda_c,
            epsilon,
            n,
            phases,
            offsets,
        }
    }

    pub fn validate(&self) -> Result<(), DarbouxError> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.1) {
            return Err(DarbouxError::InvalidSpec(format!(
                "epsilon {} outside (0, 0.1]",
                self.epsilon
            )));
        }
        if self.n == 0 || self.n > 3 {
            return Err(DarbouxError::InvalidSpec(format!(
                "order {} outside 1..=3",
                self.n
            )));
        }
        if self.offsets.len() != self.n {
            return Err(DarbouxError::InvalidSpec(format!(
                "{} offsets for order {}",
                self.offsets.len(),
                self.n
            )));
        }
        for (i, o) in self.offsets.iter().enumerate() {
            if (o.norm() - 1.0).abs() > 1e-12 {
                return Err(DarbouxError::InvalidSpec(format!(
                    "offset {o} is not unit modulus"
                )));
            }
            if self.offsets[i + 1..].iter().any(|p| (p - o).norm() < 1e-12) {
                return Err(DarbouxError::InvalidSpec("offsets must be distinct".into()));
            }
        }
        Ok(())
    }
}

/// Order-n solution approximated at finite ε with `λ_j = λ_c(1 + ε·offset_j)`.
///
/// Plane-wave seeds use the phase weights `D₁ = exp(−i s S(ε·offset_j))`,
/// `D₂ = exp(+i s S(ε·offset_j))`.
pub fn degenerate_limit(spec: &DegenerationSpec, seed: &Seed) -> Result<DTOutput, DarbouxError> {
    degenerate_limit_with(spec, seed, DtConfig::default())
}

pub fn degenerate_limit_with(
    spec: &DegenerationSpec,
    seed: &Seed,
    config: DtConfig,
) -> Result<DTOutput, DarbouxError> {
    spec.validate()?;
    check_pair(spec.lambda_c)?;
    let entries = spec
        .offsets
        .iter()
        .map(|&o| {
            let e = o * spec.epsilon;
            let w = if seed.is_plane_wave() {
                Weights::Phase {
                    poly: spec.phases,
                    e,
                }
            } else {
                Weights::unit()
            };
            (Eigenvalue::perturbed(spec.lambda_c, e), w)
        })
        .collect();
    let set = reduced_from(entries, seed)?;
    let p = config
        .precision
        .unwrap_or_else(|| auto_precision(spec.epsilon));
    Ok(DTOutput::new(
        set,
        *seed,
        Method::NFold,
        p,
        config.condition_bound,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::{make_plane_wave_seed, zero_seed_eigenfunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reduced_set_structure() {
        let seed = Seed::zero(1.0, 1.0, 1.0).unwrap();
        let set = build_reduced_set(&[c(1.0, 2.0)], &seed, &[(c(1.0, 0.0), c(1.0, 0.0))]).unwrap();
        assert_eq!(set.data.len(), 2);
        assert_eq!(set.data[1].lambda(), c(1.0, -2.0));
        let d1 = zero_seed_eigenfunction(c(1.0, 2.0)).unwrap();
        for &(x, t) in &[(0.3, -0.2), (1.0, 1.0)] {
            assert_eq!(set.data[1].phi(x, t), d1.varphi(x, t).conj());
        }
        assert!(matches!(
            build_reduced_set(&[c(1.0, 0.0)], &seed, &[(c(1.0, 0.0), c(1.0, 0.0))]),
            Err(DarbouxError::DegeneratePair(_))
        ));
        assert!(matches!(
            build_reduced_set(&[c(0.0, 1.0)], &seed, &[(c(1.0, 0.0), c(1.0, 0.0))]),
            Err(DarbouxError::DegeneratePair(_))
        ));
    }

    #[test]
    fn branch_point_rejected() {
        let seed = make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            build_reduced_set(&[c(1.0, 1.0)], &seed, &[(c(1.0, 0.0), c(1.0, 0.0))]),
            Err(DarbouxError::BranchPoint(_))
        ));
    }

    #[test]
    fn coincident_eigenvalues_give_identity_action() {
        let seed = make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let d =
            crate::lax::plane_wave_eigenfunction(c(0.5, 1.0), &seed, (c(1.0, 0.0), c(1.0, 0.0)))
                .unwrap();
        let set = SpectralSet {
            data: vec![d.clone(), d],
            reduction: false,
        };
        let out = one_fold(&set, &seed).unwrap();
        // λ₁ = λ₂ makes c₁ vanish and a₂ = −1, so Q¹ = Q
        let q = out.eval(0.4, 0.1);
        match q {
            Ok(v) => assert!((v - seed.value(0.4, 0.1)).norm() < 1e-12),
            Err(e) => assert!(matches!(e, DarbouxError::DenominatorVanishes { .. })),
        }
    }

    #[test]
    fn spec_validation() {
        let mut s = DegenerationSpec::new(c(1.0, 1.0), 0.5, 2, PhasePolynomial::default());
        assert!(s.validate().is_err());
        s.epsilon = 1e-2;
        assert!(s.validate().is_ok());
        s.offsets = vec![c(1.0, 0.0), c(1.0, 0.0)];
        assert!(s.validate().is_err());
        let s4 = DegenerationSpec::new(c(1.0, 1.0), 1e-2, 4, PhasePolynomial::default());
        assert!(s4.validate().is_err());
    }
}
