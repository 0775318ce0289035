//! Grids, sampled complex fields, determinants and finite differences.

pub mod dd;
mod field;
mod matrix;
mod scalar;

pub use dd::{CDd, Dd};
pub use field::{central_diff, sample, Axis, ComplexField2D, Grid2D};
pub use matrix::{det_in_place, ComplexMatrix, Elimination};
pub use scalar::Scalar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix of order {n} cannot hold {len} entries")]
    NotSquare { n: usize, len: usize },
    #[error("grid too small: need at least {needed} samples along the axis, got {got}")]
    GridTooSmall { needed: usize, got: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("unsupported derivative order {0}")]
    UnsupportedOrder(u8),
}

/// Arithmetic used for determinant-heavy kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!(
                "unknown precision '{other}' (expected double or extended)"
            )),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        })
    }
}
