//! The generator matrix and its file formats.
//!
//! JSON: `{"dim": d, "entries": [row-major reals], "label": "..."}` with an
//! optional `"vectors"` map of named designated vectors. CSV: `d` lines of
//! `d` comma-separated reals; blank lines and lines starting with `#` are
//! ignored.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dense real generator `A` of the semigroup `e^{tA}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    entries: DMatrix<f64>,
    label: Option<String>,
}

/// On-disk matrix record.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vectors: BTreeMap<String, Vec<f64>>,
}

impl GeneratorMatrix {
    /// Builds a generator from row-major entries.
    pub fn new(dim: usize, entries: Vec<f64>, label: Option<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dimension {dim}, found {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, &entries), label)
    }

    pub fn from_matrix(entries: DMatrix<f64>, label: Option<String>) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if let Some(pos) = entries.iter().position(|x| !x.is_finite()) {
            let d = entries.nrows();
            // column-major storage
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                pos % d,
                pos / d
            )));
        }
        Ok(Self { entries, label })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidMatrix("rows must all have length d".into()));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(d, flat, None)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(dim, dim), None).expect("zero matrix is valid")
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(DMatrix::identity(dim, dim), None).expect("identity is valid")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_matrix(
            DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(diag)),
            None,
        )
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.entries)
    }

    /// `A + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let d = self.dim();
        Self {
            entries: &self.entries + DMatrix::identity(d, d) * c,
            label: self.label.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
            label: self.label.clone(),
        }
    }

    /// Off-diagonal entries all `>= -tol`.
    pub fn is_metzler(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.entries[(i, j)] >= -tol))
    }

    pub fn row_major(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[(i, j)])
            .collect()
    }

    /// SHA-256 over the dimension and the row-major IEEE-754 bit patterns.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim() as u64).to_le_bytes());
        for x in self.row_major() {
            h.update(x.to_le_bytes());
        }
        h.finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            dim: self.dim(),
            entries: self.row_major(),
            label: self.label.clone(),
            vectors: BTreeMap::new(),
        }
    }

    pub fn from_file(file: MatrixFile) -> Result<Self> {
        for (name, v) in &file.vectors {
            if v.len() != file.dim {
                return Err(Error::InvalidMatrix(format!(
                    "vector `{name}` has length {}, expected {}",
                    v.len(),
                    file.dim
                )));
            }
        }
        Self::new(file.dim, file.entries, file.label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("matrix serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_file(file)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            let mut column = 1;
            for field in line.split(',') {
                let value = field.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    column: column + (field.len() - field.trim_start().len()),
                    message: format!("`{}`: {e}", field.trim()),
                })?;
                row.push(value);
                column += field.len() + 1;
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        column: 1,
                        message: format!("expected {} fields, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        let d = rows.len();
        if d == 0 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "no matrix rows".into(),
            });
        }
        if rows[0].len() != d {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("matrix is {}x{}, must be square", d, rows[0].len()),
            });
        }
        Self::new(d, rows.concat(), None)
    }

    /// Reads JSON or CSV, chosen by extension (`.csv`) or by a leading `{`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_csv = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv || !text.trim_start().starts_with('{') {
            Self::from_csv(&text)
        } else {
            Self::from_json(&text)
        }
    }
}

/// Max-row-sum norm of a real matrix.
pub fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Max-row-sum norm of a complex matrix.
pub fn norm_inf_c(m: &DMatrix<nalgebra::Complex<f64>>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest entry of a matrix.
pub fn min_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest entry of a matrix.
pub fn max_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Max over columns of the `ℓ1` norm of the negative part of the column:
/// the largest cone distance over the positive `ℓ1` unit ball.
pub fn max_column_negative_part(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| (-x).max(0.0)).sum::<f64>())
        .fold(0.0, f64::max)
}
