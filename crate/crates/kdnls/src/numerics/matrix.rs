use super::dd::CDd;
use super::scalar::Scalar;
use super::{NumericsError, Precision};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

/// Result of a pivoted elimination.
#[derive(Debug, Clone, Copy)]
pub struct Elimination<T> {
    pub det: T,
    /// Largest pivot modulus divided by the smallest; infinite when singular.
    pub pivot_ratio: f64,
}

impl ComplexMatrix {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self, NumericsError> {
        if n == 0 || entries.len() != n * n {
            return Err(NumericsError::NotSquare {
                n,
                len: entries.len(),
            });
        }
        Ok(ComplexMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, NumericsError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(NumericsError::NotSquare {
                    n,
                    len: r.len() * n,
                });
            }
            entries.extend_from_slice(r);
        }
        Self::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix { n, entries }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n, "matmul order mismatch");
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                for j in 0..n {
                    out[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        ComplexMatrix { n, entries: out }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect()
    }

    fn check_finite(&self) -> Result<(), NumericsError> {
        match self
            .entries
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            Some(k) => Err(NumericsError::NonFinite {
                row: k / self.n,
                col: k % self.n,
            }),
            None => Ok(()),
        }
    }

    /// Determinant by row elimination with partial pivoting.
    pub fn det(&self) -> Result<Complex64, NumericsError> {
        self.det_with(Precision::Double)
    }

    pub fn det_with(&self, precision: Precision) -> Result<Complex64, NumericsError> {
        Ok(self.eliminate(precision)?.det)
    }

    pub fn eliminate(&self, precision: Precision) -> Result<Elimination<Complex64>, NumericsError> {
        self.check_finite()?;
        Ok(match precision {
            Precision::Double => {
                let mut work = self.entries.clone();
                det_in_place(&mut work, self.n)
            }
            Precision::Extended => {
                let mut work: Vec<CDd> = self.entries.iter().map(|&z| CDd::from_c64(z)).collect();
                let e = det_in_place(&mut work, self.n);
                Elimination {
                    det: e.det.to_c64(),
                    pivot_ratio: e.pivot_ratio,
                }
            }
        })
    }
}

/// Determinant of the row-major `n`×`n` matrix held in `a`, destroying it.
pub fn det_in_place<T: Scalar>(a: &mut [T], n: usize) -> Elimination<T> {
    debug_assert_eq!(a.len(), n * n);
    let mut det = T::one();
    let mut pmax = 0.0f64;
    let mut pmin = f64::INFINITY;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].modulus();
        for r in (k + 1)..n {
            let m = a[r * n + k].modulus();
            if m > best {
                best = m;
                p = r;
            }
        }
        if best == 0.0 {
            return Elimination {
                det: T::zero(),
                pivot_ratio: f64::INFINITY,
            };
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            det = -det;
        }
        pmax = pmax.max(best);
        pmin = pmin.min(best);
        let piv = a[k * n + k];
        det = det * piv;
        for r in (k + 1)..n {
            let f = a[r * n + k] / piv;
            if f.modulus() == 0.0 {
                continue;
            }
            for c in (k + 1)..n {
                let v = a[k * n + c];
                a[r * n + c] = a[r * n + c] - f * v;
            }
        }
    }
    Elimination {
        det,
        pivot_ratio: pmax / pmin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_cases() {
        let one = ComplexMatrix::new(1, vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(one.det().unwrap(), c(1.0, 0.0));
        let perm = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(perm.det().unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn non_finite_rejected() {
        let m = ComplexMatrix::new(
            2,
            vec![c(1.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            m.det(),
            Err(NumericsError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn extended_matches_double() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0)],
            vec![c(-2.0, 0.1), c(4.0, 4.0), c(0.0, 1.0)],
            vec![c(0.3, 0.3), c(-1.0, 0.0), c(2.0, -2.0)],
        ])
        .unwrap();
        let a = m.det().unwrap();
        let b = m.det_with(Precision::Extended).unwrap();
        assert!((a - b).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn singular_has_infinite_ratio() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        let e = m.eliminate(Precision::Double).unwrap();
        assert_eq!(e.det, c(0.0, 0.0));
        assert!(e.pivot_ratio.is_infinite());
    }
}
