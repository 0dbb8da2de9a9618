//! Dense real matrices and their text formats.
//!
//! CSV: one matrix row per line, comma separated, numbers written with 17
//! significant digits. JSON: `{"rows": r, "cols": c, "entries": [...]}` with
//! `entries` in row-major order.

use std::fmt;
use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::g17;

/// A dense matrix with finite `f64` entries.
///
/// Zero-column matrices are allowed so that juxtaposition and compression
/// have an identity element.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    pub fn new(inner: DMatrix<f64>) -> Result<Self> {
        if inner.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(inner))
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch(format!(
                "column of length {} in a matrix with {rows} rows",
                bad.len()
            )));
        }
        let flat: Vec<f64> = columns.iter().flatten().copied().collect();
        Self::new(DMatrix::from_column_slice(rows, columns.len(), &flat))
    }

    pub fn identity_columns(rows: usize, cols: usize) -> Self {
        Self(DMatrix::identity(rows, cols))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<f64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn as_inner(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Copy of the matrix with column `j` removed.
    pub fn without_column(&self, j: usize) -> Self {
        Self(self.0.clone().remove_column(j))
    }

    /// Copy of columns `start..start + count`.
    pub fn columns_range(&self, start: usize, count: usize) -> Self {
        Self(self.0.columns(start, count).into_owned())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut entries = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            match cols {
                None => cols = Some(record.len()),
                Some(c) if c != record.len() => {
                    return Err(Error::Parse(format!(
                        "row {} has {} fields, expected {c}",
                        rows + 1,
                        record.len()
                    )))
                }
                _ => {}
            }
            for field in record.iter() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Parse(format!("not a number: {field:?}")))?;
                entries.push(v);
            }
            rows += 1;
        }
        let cols = cols.ok_or(Error::Empty)?;
        Self::from_row_major(rows, cols, &entries)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols()).map(|j| g17(self.0[(i, j)])).collect();
            wtr.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_row_major(doc.rows, doc.cols, &doc.entries)
    }

    pub fn to_json(&self) -> String {
        let doc = MatrixDoc { rows: self.rows(), cols: self.cols(), entries: self.entries() };
        serde_json::to_string(&doc).expect("matrix serializes")
    }
}

impl From<DMatrix<f64>> for DenseMatrix {
    /// Panics on non-finite entries; use [`DenseMatrix::new`] for untrusted data.
    fn from(inner: DMatrix<f64>) -> Self {
        Self::new(inner).expect("finite matrix")
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix({}x{}) {:?}", self.rows(), self.cols(), self.entries())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}
