//! JSON instance files: `{dim, rho, a, b}` with each matrix a row-major grid
//! of `{re, im}` objects, plus an optional `q`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hermitian::{DensityMatrix, HermitianMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexScalar {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexScalar {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexScalar> for Complex64 {
    fn from(z: ComplexScalar) -> Self {
        Complex64::new(z.re, z.im)
    }
}

pub type Grid = Vec<Vec<ComplexScalar>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dim: usize,
    pub rho: Grid,
    pub a: Grid,
    pub b: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

/// A validated `(rho, A, B)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub rho: DensityMatrix,
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("cannot read instance file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}` is not a {dim}x{dim} grid")]
    Shape { field: &'static str, dim: usize },
    #[error("invalid field `{field}`: {source}")]
    Invalid { field: &'static str, source: Error },
}

fn to_grid(rows: Vec<Vec<Complex64>>) -> Grid {
    rows.into_iter().map(|r| r.into_iter().map(ComplexScalar::from).collect()).collect()
}

fn from_grid(grid: &Grid, dim: usize, field: &'static str) -> Result<Vec<Vec<Complex64>>, InstanceError> {
    if dim == 0 || grid.len() != dim || grid.iter().any(|r| r.len() != dim) {
        return Err(InstanceError::Shape { field, dim });
    }
    Ok(grid.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect())
}

impl Instance {
    pub fn to_file(&self, q: Option<f64>) -> InstanceFile {
        InstanceFile {
            dim: self.rho.dim(),
            rho: to_grid(self.rho.as_hermitian().rows()),
            a: to_grid(self.a.rows()),
            b: to_grid(self.b.rows()),
            q,
        }
    }

    pub fn to_json(&self, q: Option<f64>) -> String {
        serde_json::to_string_pretty(&self.to_file(q)).expect("instance serializes")
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, InstanceError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<Instance, InstanceError> {
        let rho = from_grid(&self.rho, self.dim, "rho")?;
        let a = from_grid(&self.a, self.dim, "a")?;
        let b = from_grid(&self.b, self.dim, "b")?;
        Ok(Instance {
            rho: DensityMatrix::from_rows(&rho).map_err(|source| InstanceError::Invalid { field: "rho", source })?,
            a: HermitianMatrix::from_rows(&a).map_err(|source| InstanceError::Invalid { field: "a", source })?,
            b: HermitianMatrix::from_rows(&b).map_err(|source| InstanceError::Invalid { field: "b", source })?,
        })
    }
}
