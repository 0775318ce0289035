use super::NumericsError;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Uniform rectangular sampling of the (x, t) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nx: usize,
    pub nt: usize,
}

impl Grid2D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        t_min: f64,
        t_max: f64,
        nx: usize,
        nt: usize,
    ) -> Result<Self, NumericsError> {
        let g = Grid2D {
            x_min,
            x_max,
            t_min,
            t_max,
            nx,
            nt,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        let finite = [self.x_min, self.x_max, self.t_min, self.t_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite
            || self.nx < 2
            || self.nt < 2
            || self.x_max <= self.x_min
            || self.t_max <= self.t_min
        {
            return Err(NumericsError::InvalidGrid(format!(
                "x {}..{} ({}), t {}..{} ({})",
                self.x_min, self.x_max, self.nx, self.t_min, self.t_max, self.nt
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    #[inline]
    pub fn ht(&self) -> f64 {
        (self.t_max - self.t_min) / (self.nt - 1) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.hx()
        }
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        if j + 1 == self.nt {
            self.t_max
        } else {
            self.t_min + j as f64 * self.ht()
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.nt
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index with x varying fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Same window with both spacings halved.
    pub fn refined(&self) -> Grid2D {
        Grid2D {
            nx: 2 * (self.nx - 1) + 1,
            nt: 2 * (self.nt - 1) + 1,
            ..*self
        }
    }

    /// Grid with spacings `hx`, `ht` covering at least the given window.
    pub fn with_spacing(
        x_min: f64,
        x_max: f64,
        t_min: f64,
        t_max: f64,
        hx: f64,
        ht: f64,
    ) -> Result<Self, NumericsError> {
        let nx = ((x_max - x_min) / hx).round() as usize + 1;
        let nt = ((t_max - t_min) / ht).round() as usize + 1;
        Grid2D::new(x_min, x_max, t_min, t_max, nx, nt)
    }

    /// Window with `k` nodes removed from every side.
    pub fn shrink(&self, k: usize) -> Option<Grid2D> {
        if self.nx <= 2 * k + 1 || self.nt <= 2 * k + 1 {
            return None;
        }
        Some(Grid2D {
            x_min: self.x(k),
            x_max: self.x(self.nx - 1 - k),
            t_min: self.t(k),
            t_max: self.t(self.nt - 1 - k),
            nx: self.nx - 2 * k,
            nt: self.nt - 2 * k,
        })
    }
}

/// Complex samples over a [`Grid2D`].
///
/// `flagged` marks nodes whose value is non-finite or otherwise unusable;
/// `degraded` marks nodes computed with boundary stencils.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
    pub flagged: Vec<bool>,
    pub degraded: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    T,
}

impl ComplexField2D {
    pub fn from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Self, NumericsError> {
        if values.len() != grid.len() {
            return Err(NumericsError::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let flagged = values.iter().map(|z| !is_finite(*z)).collect();
        Ok(ComplexField2D {
            grid,
            values,
            flagged,
            degraded: vec![false; grid.len()],
        })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    /// |Q|² as a real-valued field stored in the real part.
    pub fn intensity(&self) -> ComplexField2D {
        ComplexField2D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .map(|z| Complex64::new(z.norm_sqr(), 0.0))
                .collect(),
            flagged: self.flagged.clone(),
            degraded: self.degraded.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexField2D {
        let values: Vec<Complex64> = self.values.iter().map(|&z| f(z)).collect();
        let flagged = values
            .iter()
            .zip(&self.flagged)
            .map(|(z, &fl)| fl || !is_finite(*z))
            .collect();
        ComplexField2D {
            grid: self.grid,
            values,
            flagged,
            degraded: self.degraded.clone(),
        }
    }
}

#[inline]
pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Evaluates `f` at every node; non-finite results are flagged, never fatal.
pub fn sample<F>(f: F, grid: &Grid2D) -> ComplexField2D
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let g = *grid;
    let values: Vec<Complex64> = (0..g.len())
        .into_par_iter()
        .map(|k| f(g.x(k % g.nx), g.t(k / g.nx)))
        .collect();
    let flagged = values.iter().map(|z| !is_finite(*z)).collect();
    ComplexField2D {
        grid: g,
        values,
        flagged,
        degraded: vec![false; g.len()],
    }
}

/// Second-order finite differences along one axis.
///
/// Interior nodes use central stencils; the two end nodes use one-sided
/// second-order stencils and are marked `degraded`. A result touching a
/// flagged input is flagged.
pub fn central_diff(
    field: &ComplexField2D,
    axis: Axis,
    order: u8,
) -> Result<ComplexField2D, NumericsError> {
    let g = field.grid;
    let (n, h) = match axis {
        Axis::X => (g.nx, g.hx()),
        Axis::T => (g.nt, g.ht()),
    };
    if n < 5 {
        return Err(NumericsError::GridTooSmall { needed: 5, got: n });
    }
    if order != 1 && order != 2 {
        return Err(NumericsError::UnsupportedOrder(order));
    }
    let idx = |line: usize, k: usize| match axis {
        Axis::X => g.index(k, line),
        Axis::T => g.index(line, k),
    };
    let lines = match axis {
        Axis::X => g.nt,
        Axis::T => g.nx,
    };
    let mut values = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut flagged = field.flagged.clone();
    let mut degraded = field.degraded.clone();
    for line in 0..lines {
        for k in 0..n {
            let (taps, coefs, is_edge): (&[isize], &[f64], bool) = match (order, k) {
                (1, 0) => (&[0, 1, 2], &[-1.5, 2.0, -0.5], true),
                (1, k) if k == n - 1 => (&[0, -1, -2], &[1.5, -2.0, 0.5], true),
                (1, _) => (&[-1, 1], &[-0.5, 0.5], false),
                (_, 0) => (&[0, 1, 2, 3], &[2.0, -5.0, 4.0, -1.0], true),
                (_, k) if k == n - 1 => (&[0, -1, -2, -3], &[2.0, -5.0, 4.0, -1.0], true),
                _ => (&[-1, 0, 1], &[1.0, -2.0, 1.0], false),
            };
            let mut acc = Complex64::new(0.0, 0.0);
            let mut bad = false;
            for (&tap, &c) in taps.iter().zip(coefs) {
                let kk = (k as isize + tap) as usize;
                let p = idx(line, kk);
                bad |= field.flagged[p];
                acc += field.values[p] * c;
            }
            let scale = if order == 1 { h } else { h * h };
            let out = idx(line, k);
            values[out] = acc / scale;
            flagged[out] = bad || !is_finite(values[out]);
            degraded[out] |= is_edge;
        }
    }
    Ok(ComplexField2D {
        grid: g,
        values,
        flagged,
        degraded,
    })
}
