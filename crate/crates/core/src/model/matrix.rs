use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        if values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(DenseMatrix { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }
}

/// Sparse matrix indexed both by row and by column.
///
/// The row view and the column view hold the same nonzeros; each is sorted
/// by the secondary index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    row_cols: Vec<u32>,
    row_vals: Vec<f64>,
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds the dual index from `(row, col, value)` triplets. Explicit
    /// zeros are dropped; duplicate positions are rejected.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        if rows > u32::MAX as usize || cols > u32::MAX as usize {
            return Err(Error::Dimension("matrix too large for 32-bit indices".into()));
        }
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("matrix entries"));
            }
            if v != 0.0 {
                entries.push((r, c, v));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        if entries.windows(2).any(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::Dimension("duplicate matrix entry".into()));
        }

        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let row_cols = entries.iter().map(|&(_, c, _)| c as u32).collect();
        let row_vals = entries.iter().map(|&(_, _, v)| v).collect();

        let mut col_ptr = vec![0usize; cols + 1];
        for &(_, c, _) in &entries {
            col_ptr[c + 1] += 1;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut fill = col_ptr.clone();
        let mut col_rows = vec![0u32; entries.len()];
        let mut col_vals = vec![0.0; entries.len()];
        // entries are row-sorted, so each column list comes out row-sorted
        for &(r, c, v) in &entries {
            let k = fill[c];
            col_rows[k] = r as u32;
            col_vals[k] = v;
            fill[c] += 1;
        }

        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            row_cols,
            row_vals,
            col_ptr,
            col_rows,
            col_vals,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_vals.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.row_cols[span.clone()], &self.row_vals[span])
    }

    /// Row indices and values of column `c`.
    pub fn col(&self, c: usize) -> (&[u32], &[f64]) {
        let span = self.col_ptr[c]..self.col_ptr[c + 1];
        (&self.col_rows[span.clone()], &self.col_vals[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&(c as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Nonzeros in row-major order.
    pub fn triplets_by_row(&self) -> Vec<(usize, usize, f64)> {
        (0..self.rows)
            .flat_map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(move |(&c, &v)| (r, c as usize, v))
            })
            .collect()
    }

    /// Nonzeros in column-major order.
    pub fn triplets_by_col(&self) -> Vec<(usize, usize, f64)> {
        (0..self.cols)
            .flat_map(|c| {
                let (rows, vals) = self.col(c);
                rows.iter().zip(vals).map(move |(&r, &v)| (r as usize, c, v))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageKind {
    Dense,
    Sparse,
}

/// A measurement operator in either dense or dual-indexed sparse storage.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementMatrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl MeasurementMatrix {
    pub fn rows(&self) -> usize {
        match self {
            MeasurementMatrix::Dense(d) => d.rows(),
            MeasurementMatrix::Sparse(s) => s.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            MeasurementMatrix::Dense(d) => d.cols(),
            MeasurementMatrix::Sparse(s) => s.cols(),
        }
    }

    pub fn storage(&self) -> StorageKind {
        match self {
            MeasurementMatrix::Dense(_) => StorageKind::Dense,
            MeasurementMatrix::Sparse(_) => StorageKind::Sparse,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self {
            MeasurementMatrix::Dense(d) => d.get(r, c),
            MeasurementMatrix::Sparse(s) => s.get(r, c),
        }
    }

    /// Stored entries: `rows * cols` for dense, nonzeros for sparse.
    pub fn stored_entries(&self) -> usize {
        match self {
            MeasurementMatrix::Dense(d) => d.rows() * d.cols(),
            MeasurementMatrix::Sparse(s) => s.nnz(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols() {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols()
            )));
        }
        Ok(match self {
            MeasurementMatrix::Dense(d) => (0..d.rows())
                .map(|r| d.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
            MeasurementMatrix::Sparse(s) => (0..s.rows())
                .map(|r| {
                    let (cols, vals) = s.row(r);
                    cols.iter().zip(vals).map(|(&c, v)| v * x[c as usize]).sum()
                })
                .collect(),
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            MeasurementMatrix::Dense(d) => d.clone(),
            MeasurementMatrix::Sparse(s) => {
                let mut values = vec![0.0; s.rows() * s.cols()];
                for (r, c, v) in s.triplets_by_row() {
                    values[r * s.cols() + c] = v;
                }
                DenseMatrix {
                    rows: s.rows(),
                    cols: s.cols(),
                    values,
                }
            }
        }
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        match self {
            MeasurementMatrix::Sparse(s) => s.clone(),
            MeasurementMatrix::Dense(d) => {
                let triplets: Vec<_> = (0..d.rows())
                    .flat_map(|r| d.row(r).iter().enumerate().map(move |(c, &v)| (r, c, v)))
                    .collect();
                SparseMatrix::from_triplets(d.rows(), d.cols(), &triplets)
                    .expect("dense entries are finite and unique")
            }
        }
    }

    /// Writes the matrix as comma-separated rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let dense = self.to_dense();
        for r in 0..dense.rows() {
            w.write_record(dense.row(r).iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

impl From<DenseMatrix> for MeasurementMatrix {
    fn from(d: DenseMatrix) -> Self {
        MeasurementMatrix::Dense(d)
    }
}

impl From<SparseMatrix> for MeasurementMatrix {
    fn from(s: SparseMatrix) -> Self {
        MeasurementMatrix::Sparse(s)
    }
}
