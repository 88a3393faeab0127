//! JSON file formats for states and unitaries.
//!
//! States: `{ "dim_a": 2, "dim_b": d, "matrix": [[[re, im], ...], ...] }`, row-major.
//! Unitaries use the same `matrix` layout without the dimension fields.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{validate_state, DensityMatrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryFile {
    pub matrix: Vec<Vec<[f64; 2]>>,
}

fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    let cols = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::Parse(format!("ragged matrix: row of length {} vs {cols}", bad.len())));
    }
    Ok(CMatrix::from_fn(n, cols, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    let file = StateFile { dim_a: rho.dim_a(), dim_b: rho.dim_b(), matrix: to_rows(rho.matrix()) };
    serde_json::to_string_pretty(&file).expect("state serialization is infallible")
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text)?;
    if file.dim_a != 2 {
        return Err(Error::Parse(format!("dim_a must be 2, got {}", file.dim_a)));
    }
    validate_state(from_rows(&file.matrix)?, file.dim_b)
}

pub fn unitary_to_json(u: &UnitaryMatrix) -> String {
    serde_json::to_string_pretty(&UnitaryFile { matrix: to_rows(u.matrix()) })
        .expect("unitary serialization is infallible")
}

pub fn unitary_from_json(text: &str) -> Result<UnitaryMatrix> {
    let file: UnitaryFile = serde_json::from_str(text)?;
    UnitaryMatrix::new(from_rows(&file.matrix)?)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    state_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    Ok(std::fs::write(path, state_to_json(rho))?)
}

pub fn read_unitary(path: impl AsRef<Path>) -> Result<UnitaryMatrix> {
    unitary_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_unitary(path: impl AsRef<Path>, u: &UnitaryMatrix) -> Result<()> {
    Ok(std::fs::write(path, unitary_to_json(u))?)
}
