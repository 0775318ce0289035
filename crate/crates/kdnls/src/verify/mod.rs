//! Residual operators, field comparison, convergence studies and peak analysis.

pub mod acceptance;
mod peaks;

pub use peaks::{peak_analysis, peak_analysis_with, Classification, Peak, PeakSet};

use crate::lax::{zero_curvature_residual, Jet, Seed};
use crate::numerics::{sample, ComplexField2D, Grid2D, NumericsError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("every interior node is excluded (flagged or adjacent to a flagged node)")]
    AllNodesExcluded,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("at least {0} refinement levels are required")]
    TooFewRefinements(usize),
    #[error("epsilon ladder must be strictly decreasing with at least two entries")]
    InvalidLadder,
    #[error("grid spacing {spacing} exceeds {limit}; humps would span too few nodes")]
    ResolutionTooCoarse { spacing: f64, limit: f64 },
    #[error("background window fraction {0} must lie in (0, 0.5)")]
    InvalidWindow(f64),
    #[error("family evaluation failed: {0}")]
    Family(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VConjugation {
    /// V₁₂ = i·conj(G).
    GStar,
    /// V₁₂ = i·G̃ with G̃ the R-analogue of G.
    GIndependent,
}

/// One reading of the sign of the `iα(Q²Q*)ₓ` term (equivalently `R = ∓Q*`)
/// and of the (1,2) entry of V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConventionVariant {
    pub nonlinear_sign: NonlinearSign,
    pub v_conjugation: VConjugation,
}

impl ConventionVariant {
    /// The variant selected by the plane-wave pin-down.
    pub const CANONICAL: ConventionVariant = ConventionVariant {
        nonlinear_sign: NonlinearSign::Plus,
        v_conjugation: VConjugation::GIndependent,
    };

    pub fn all() -> [ConventionVariant; 4] {
        let mut out = [Self::CANONICAL; 4];
        let mut k = 0;
        for s in [NonlinearSign::Plus, NonlinearSign::Minus] {
            for v in [VConjugation::GStar, VConjugation::GIndependent] {
                out[k] = ConventionVariant {
                    nonlinear_sign: s,
                    v_conjugation: v,
                };
                k += 1;
            }
        }
        out
    }

    pub fn sign(&self) -> f64 {
        match self.nonlinear_sign {
            NonlinearSign::Plus => 1.0,
            NonlinearSign::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for ConventionVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self.nonlinear_sign {
            NonlinearSign::Plus => "+1",
            NonlinearSign::Minus => "-1",
        };
        let v = match self.v_conjugation {
            VConjugation::GStar => "g_star",
            VConjugation::GIndependent => "g_independent",
        };
        write!(f, "sign={s},v12={v}")
    }
}

impl std::str::FromStr for ConventionVariant {
    type Err = String;
    /// Accepts `canonical` or the `Display` form, e.g. `sign=-1,v12=g_star`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "canonical" {
            return Ok(Self::CANONICAL);
        }
        Self::all()
            .into_iter()
            .find(|v| v.to_string() == s)
            .ok_or_else(|| format!("unknown convention variant '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub h: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub variant: ConventionVariant,
    pub norms: Vec<NormEntry>,
    /// log₂ of the max-residual ratio of the two finest levels.
    pub estimated_order: f64,
    pub interior_window: Grid2D,
    pub excluded_nodes: usize,
}

impl ResidualReport {
    pub fn from_norms(
        variant: ConventionVariant,
        norms: Vec<NormEntry>,
        interior_window: Grid2D,
    ) -> Self {
        let estimated_order = match norms.len() {
            0 | 1 => f64::NAN,
            n => (norms[n - 2].max_residual / norms[n - 1].max_residual).log2(),
        };
        ResidualReport {
            variant,
            norms,
            estimated_order,
            interior_window,
            excluded_nodes: 0,
        }
    }

    pub fn finest_max(&self) -> f64 {
        self.norms
            .last()
            .map(|n| n.max_residual)
            .unwrap_or(f64::NAN)
    }

    pub fn order_in(&self, lo: f64, hi: f64) -> bool {
        self.estimated_order >= lo && self.estimated_order <= hi
    }
}

/// Pointwise value of
/// `iQₜ + Qₓₓ + s·iα(Q²Q*)ₓ − (θₜ + θₓ²)Q + θₓ(2iQₓ − s·αQ²Q*)`.
pub fn pde_operator(
    jet: &Jet,
    nx: Complex64,
    seed: &Seed,
    variant: ConventionVariant,
) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let s = variant.sign();
    let a = seed.alpha;
    let (p, q) = (seed.theta.p, seed.theta.q);
    let n = jet.q * jet.q * jet.q.conj();
    i * jet.qt + jet.qxx + s * i * a * nx - (q + p * p) * jet.q + p * (2.0 * i * jet.qx - s * a * n)
}

/// `(Q²Q*)ₓ` from a jet.
pub fn cubic_x(jet: &Jet) -> Complex64 {
    2.0 * jet.q * jet.qx * jet.q.conj() + jet.q * jet.q * jet.qx.conj()
}

/// Finite-difference residual of the PDE on `grid` and `refinements − 1`
/// successive halvings. Only interior nodes whose 3×3 neighbourhood is free
/// of flagged nodes enter the norms.
pub fn pde_residual<F>(
    field_source: F,
    seed: &Seed,
    variant: ConventionVariant,
    grid: &Grid2D,
    refinements: usize,
) -> Result<ResidualReport, VerifyError>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    if refinements < 2 {
        return Err(VerifyError::TooFewRefinements(2));
    }
    let mut norms = Vec::with_capacity(refinements);
    let mut g = *grid;
    let mut excluded = 0;
    for _ in 0..refinements {
        let field = sample(&field_source, &g);
        let (entry, ex) = fd_residual_norms(&field, seed, variant)?;
        norms.push(entry);
        excluded = ex;
        g = g.refined();
    }
    let mut report = ResidualReport::from_norms(variant, norms, grid.shrink(1).unwrap_or(*grid));
    report.excluded_nodes = excluded;
    Ok(report)
}

fn fd_residual_norms(
    field: &ComplexField2D,
    seed: &Seed,
    variant: ConventionVariant,
) -> Result<(NormEntry, usize), VerifyError> {
    let g = field.grid;
    if g.nx < 5 || g.nt < 5 {
        return Err(VerifyError::Numerics(NumericsError::GridTooSmall {
            needed: 5,
            got: g.nx.min(g.nt),
        }));
    }
    let (hx, ht) = (g.hx(), g.ht());
    let cubic: Vec<Complex64> = field.values.iter().map(|q| q * q * q.conj()).collect();
    let mut worst = 0.0f64;
    let mut total = 0.0f64;
    let mut used = 0usize;
    let mut excluded = 0usize;
    for j in 1..g.nt - 1 {
        'node: for i in 1..g.nx - 1 {
            for dj in 0..3 {
                for di in 0..3 {
                    if field.flagged[g.index(i + di - 1, j + dj - 1)] {
                        excluded += 1;
                        continue 'node;
                    }
                }
            }
            let at = |ii: usize, jj: usize| field.values[g.index(ii, jj)];
            let q = at(i, j);
            let jet = Jet {
                q,
                qx: (at(i + 1, j) - at(i - 1, j)) / (2.0 * hx),
                qxx: (at(i + 1, j) - 2.0 * q + at(i - 1, j)) / (hx * hx),
                qt: (at(i, j + 1) - at(i, j - 1)) / (2.0 * ht),
            };
            let nx = (cubic[g.index(i + 1, j)] - cubic[g.index(i - 1, j)]) / (2.0 * hx);
            let r = pde_operator(&jet, nx, seed, variant).norm();
            if !r.is_finite() {
                excluded += 1;
                continue;
            }
            worst = worst.max(r);
            total += r;
            used += 1;
        }
    }
    if used == 0 {
        return Err(VerifyError::AllNodesExcluded);
    }
    Ok((
        NormEntry {
            h: hx,
            max_residual: worst,
            mean_residual: total / used as f64,
        },
        excluded,
    ))
}

/// PDE residual of the seed itself, evaluated on its exact derivative jet at
/// every node of `grid` and of `refinements − 1` halvings.
pub fn seed_residual(
    seed: &Seed,
    variant: ConventionVariant,
    grid: &Grid2D,
    refinements: usize,
) -> ResidualReport {
    let mut norms = Vec::new();
    let mut g = *grid;
    for _ in 0..refinements.max(1) {
        let mut worst = 0.0f64;
        let mut total = 0.0;
        for j in 0..g.nt {
            for i in 0..g.nx {
                let jet = seed.jet(g.x(i), g.t(j));
                let r = pde_operator(&jet, cubic_x(&jet), seed, variant).norm();
                worst = worst.max(r);
                total += r;
            }
        }
        norms.push(NormEntry {
            h: g.hx(),
            max_residual: worst,
            mean_residual: total / g.len() as f64,
        });
        g = g.refined();
    }
    ResidualReport::from_norms(variant, norms, *grid)
}

/// Outcome of the four-way convention test on an exact seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinDown {
    /// (variant, max PDE residual, max zero-curvature residual).
    pub results: Vec<(ConventionVariant, f64, f64)>,
    pub tolerance: f64,
    /// Set when exactly one variant passes.
    pub selected: Option<ConventionVariant>,
}

impl PinDown {
    pub fn passing(&self) -> Vec<ConventionVariant> {
        self.results
            .iter()
            .filter(|(_, p, z)| p.max(*z) <= self.tolerance)
            .map(|r| r.0)
            .collect()
    }
}

/// Selects the convention variant for which the seed satisfies both the PDE
/// and the zero-curvature condition of its Lax pair at machine level.
pub fn pin_down_variant(
    seed: &Seed,
    probe_lambda: Complex64,
    grid: &Grid2D,
    tolerance: f64,
) -> PinDown {
    let mut results = Vec::new();
    for v in ConventionVariant::all() {
        let pde = seed_residual(seed, v, grid, 2)
            .norms
            .iter()
            .fold(0.0f64, |m, n| m.max(n.max_residual));
        let mut zc = 0.0f64;
        for j in 0..grid.nt {
            for i in 0..grid.nx {
                zc = zc.max(zero_curvature_residual(
                    seed,
                    probe_lambda,
                    v,
                    grid.x(i),
                    grid.t(j),
                ));
            }
        }
        results.push((v, pde, zc));
    }
    let mut out = PinDown {
        results,
        tolerance,
        selected: None,
    };
    let passing = out.passing();
    if passing.len() == 1 {
        out.selected = Some(passing[0]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    Intensity,
    ModulusOfDifference,
    UpToGlobalPhase,
}

/// Max and mean discrepancy between two fields on the same grid, skipping
/// nodes flagged in either field.
pub fn compare_fields(
    a: &ComplexField2D,
    b: &ComplexField2D,
    mode: CompareMode,
) -> Result<(f64, f64), VerifyError> {
    if a.grid != b.grid {
        return Err(VerifyError::GridMismatch);
    }
    let usable = |k: usize| !a.flagged[k] && !b.flagged[k];
    let phase = if mode == CompareMode::UpToGlobalPhase {
        let bmax = (0..b.values.len())
            .filter(|&k| usable(k))
            .fold(0.0f64, |m, k| m.max(b.values[k].norm()));
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..a.values.len() {
            if usable(k) && b.values[k].norm() > 0.1 * bmax {
                acc += a.values[k] * b.values[k].conj();
            }
        }
        if acc.norm() > 0.0 {
            acc / acc.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut worst = 0.0f64;
    let mut total = 0.0;
    let mut used = 0usize;
    for k in 0..a.values.len() {
        if !usable(k) {
            continue;
        }
        let (x, y) = (a.values[k], b.values[k]);
        let e = match mode {
            CompareMode::Intensity => (x.norm_sqr() - y.norm_sqr()).abs(),
            CompareMode::ModulusOfDifference => (x - y).norm(),
            CompareMode::UpToGlobalPhase => (x * phase.conj() - y).norm(),
        };
        worst = worst.max(e);
        total += e;
        used += 1;
    }
    if used == 0 {
        return Err(VerifyError::AllNodesExcluded);
    }
    Ok((worst, total / used as f64))
}

/// Max of `||a|² − |b|²| / |b|²` over nodes with `|b|² > floor`.
pub fn relative_intensity_error(
    a: &ComplexField2D,
    b: &ComplexField2D,
    floor: f64,
) -> Result<f64, VerifyError> {
    if a.grid != b.grid {
        return Err(VerifyError::GridMismatch);
    }
    let mut worst = 0.0f64;
    let mut used = 0;
    for k in 0..a.values.len() {
        if a.flagged[k] || b.flagged[k] {
            continue;
        }
        let ib = b.values[k].norm_sqr();
        if ib > floor {
            worst = worst.max((a.values[k].norm_sqr() - ib).abs() / ib);
            used += 1;
        }
    }
    if used == 0 {
        return Err(VerifyError::AllNodesExcluded);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    /// (ε, max intensity error).
    pub entries: Vec<(f64, f64)>,
    /// Errors strictly decrease along the ladder.
    pub monotone: bool,
}

impl ConvergenceStudy {
    /// Last error divided by first.
    pub fn reduction(&self) -> f64 {
        match (self.entries.first(), self.entries.last()) {
            (Some(a), Some(b)) if a.1 > 0.0 => b.1 / a.1,
            _ => f64::NAN,
        }
    }
}

/// Max intensity error of `family(ε)` against `reference` along a ladder.
pub fn convergence_study<F, E>(
    family: F,
    reference: &ComplexField2D,
    eps_ladder: &[f64],
) -> Result<ConvergenceStudy, VerifyError>
where
    F: Fn(f64) -> Result<ComplexField2D, E>,
    E: std::fmt::Display,
{
    if eps_ladder.len() < 2
        || eps_ladder
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less))
    {
        return Err(VerifyError::InvalidLadder);
    }
    let mut entries = Vec::with_capacity(eps_ladder.len());
    for &eps in eps_ladder {
        let f = family(eps).map_err(|e| VerifyError::Family(e.to_string()))?;
        let (max, _) = compare_fields(&f, reference, CompareMode::Intensity)?;
        entries.push((eps, max));
    }
    let monotone = entries.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(ConvergenceStudy { entries, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::make_plane_wave_seed;

    #[test]
    fn four_variants() {
        let all = ConventionVariant::all();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let seed = make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let g = Grid2D::new(-1.0, 1.0, -1.0, 1.0, 11, 11).unwrap();
        for v in ConventionVariant::all() {
            let r = pde_residual(|_, _| Complex64::new(0.0, 0.0), &seed, v, &g, 2).unwrap();
            assert_eq!(r.finest_max(), 0.0);
        }
    }

    #[test]
    fn compare_trivial() {
        let g = Grid2D::new(-1.0, 1.0, -1.0, 1.0, 11, 11).unwrap();
        let b = sample(|x, t| Complex64::new(x, t * x + 0.5), &g);
        for m in [
            CompareMode::Intensity,
            CompareMode::ModulusOfDifference,
            CompareMode::UpToGlobalPhase,
        ] {
            assert_eq!(compare_fields(&b, &b, m).unwrap(), (0.0, 0.0));
        }
        let rot = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let a = b.map(|z| z * rot);
        assert!(
            compare_fields(&a, &b, CompareMode::UpToGlobalPhase)
                .unwrap()
                .0
                < 1e-14
        );
        assert!(
            compare_fields(&a, &b, CompareMode::ModulusOfDifference)
                .unwrap()
                .0
                > 0.1
        );
        let other = Grid2D::new(-1.0, 1.0, -1.0, 1.0, 12, 11).unwrap();
        let c = sample(|_, _| Complex64::new(0.0, 0.0), &other);
        assert_eq!(
            compare_fields(&b, &c, CompareMode::Intensity),
            Err(VerifyError::GridMismatch)
        );
    }

    #[test]
    fn constant_family_converges_trivially() {
        let g = Grid2D::new(-1.0, 1.0, -1.0, 1.0, 11, 11).unwrap();
        let r = sample(|x, _| Complex64::new(x, 0.0), &g);
        let s = convergence_study(|_| Ok::<_, String>(r.clone()), &r, &[0.1, 0.01]).unwrap();
        assert!(s.entries.iter().all(|e| e.1 == 0.0));
        assert!(convergence_study(|_| Ok::<_, String>(r.clone()), &r, &[0.01, 0.1]).is_err());
    }
}
