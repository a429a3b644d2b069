//! Column-oriented views of the measurement matrix used by the solver loops.
//!
//! Dense matrices are copied into column-major order together with their
//! elementwise squares. Sparse matrices keep both the row and the column
//! index so that projections run row by row and coefficient updates run
//! column by column, each in O(nnz).

use crate::model::MeasurementMatrix;

pub(crate) trait Columns {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn col_len(&self, i: usize) -> usize;

    /// Calls `f(row, phi, phi_sq)` for every stored entry of column `i`.
    fn for_each_in_col<F: FnMut(usize, f64, f64)>(&self, i: usize, f: F);

    /// `mean = Phi a`, `var = Phi^2 v`.
    fn project(&self, a: &[f64], v: &[f64], mean: &mut [f64], var: &mut [f64]);

    fn stored(&self) -> usize;
}

pub(crate) struct DenseOp {
    m: usize,
    n: usize,
    vals: Vec<f64>,
    sq: Vec<f64>,
}

impl Columns for DenseOp {
    fn rows(&self) -> usize {
        self.m
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn col_len(&self, _i: usize) -> usize {
        self.m
    }

    #[inline]
    fn for_each_in_col<F: FnMut(usize, f64, f64)>(&self, i: usize, mut f: F) {
        let span = i * self.m..(i + 1) * self.m;
        let vals = &self.vals[span.clone()];
        let sq = &self.sq[span];
        for (mu, (&p, &p2)) in vals.iter().zip(sq).enumerate() {
            f(mu, p, p2);
        }
    }

    fn project(&self, a: &[f64], v: &[f64], mean: &mut [f64], var: &mut [f64]) {
        mean.fill(0.0);
        var.fill(0.0);
        for i in 0..self.n {
            let span = i * self.m..(i + 1) * self.m;
            let (ai, vi) = (a[i], v[i]);
            for (s, p) in mean.iter_mut().zip(&self.vals[span.clone()]) {
                *s += p * ai;
            }
            for (s, p2) in var.iter_mut().zip(&self.sq[span]) {
                *s += p2 * vi;
            }
        }
    }

    fn stored(&self) -> usize {
        self.m * self.n
    }
}

pub(crate) struct SparseOp {
    m: usize,
    n: usize,
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<f64>,
    col_sq: Vec<f64>,
    row_ptr: Vec<usize>,
    row_cols: Vec<u32>,
    row_vals: Vec<f64>,
    row_sq: Vec<f64>,
}

impl Columns for SparseOp {
    fn rows(&self) -> usize {
        self.m
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn col_len(&self, i: usize) -> usize {
        self.col_ptr[i + 1] - self.col_ptr[i]
    }

    #[inline]
    fn for_each_in_col<F: FnMut(usize, f64, f64)>(&self, i: usize, mut f: F) {
        let span = self.col_ptr[i]..self.col_ptr[i + 1];
        let rows = &self.col_rows[span.clone()];
        let vals = &self.col_vals[span.clone()];
        let sq = &self.col_sq[span];
        for k in 0..rows.len() {
            f(rows[k] as usize, vals[k], sq[k]);
        }
    }

    fn project(&self, a: &[f64], v: &[f64], mean: &mut [f64], var: &mut [f64]) {
        for mu in 0..self.m {
            let span = self.row_ptr[mu]..self.row_ptr[mu + 1];
            let cols = &self.row_cols[span.clone()];
            let vals = &self.row_vals[span.clone()];
            let sq = &self.row_sq[span];
            let mut s_mean = 0.0;
            let mut s_var = 0.0;
            for k in 0..cols.len() {
                let j = cols[k] as usize;
                s_mean += vals[k] * a[j];
                s_var += sq[k] * v[j];
            }
            mean[mu] = s_mean;
            var[mu] = s_var;
        }
    }

    fn stored(&self) -> usize {
        self.col_vals.len()
    }
}

pub(crate) enum Operator {
    Dense(DenseOp),
    Sparse(SparseOp),
}

impl Operator {
    pub(crate) fn new(matrix: &MeasurementMatrix) -> Self {
        match matrix {
            MeasurementMatrix::Dense(d) => {
                let (m, n) = (d.rows(), d.cols());
                let mut vals = vec![0.0; m * n];
                for mu in 0..m {
                    for (i, &p) in d.row(mu).iter().enumerate() {
                        vals[i * m + mu] = p;
                    }
                }
                let sq = vals.iter().map(|p| p * p).collect();
                Operator::Dense(DenseOp { m, n, vals, sq })
            }
            MeasurementMatrix::Sparse(s) => {
                let (m, n) = (s.rows(), s.cols());
                let mut col_ptr = vec![0usize; n + 1];
                let mut col_rows = Vec::with_capacity(s.nnz());
                let mut col_vals = Vec::with_capacity(s.nnz());
                for c in 0..n {
                    let (rows, vals) = s.col(c);
                    col_rows.extend_from_slice(rows);
                    col_vals.extend_from_slice(vals);
                    col_ptr[c + 1] = col_rows.len();
                }
                let mut row_ptr = vec![0usize; m + 1];
                let mut row_cols = Vec::with_capacity(s.nnz());
                let mut row_vals = Vec::with_capacity(s.nnz());
                for r in 0..m {
                    let (cols, vals) = s.row(r);
                    row_cols.extend_from_slice(cols);
                    row_vals.extend_from_slice(vals);
                    row_ptr[r + 1] = row_cols.len();
                }
                let col_sq = col_vals.iter().map(|p| p * p).collect();
                let row_sq = row_vals.iter().map(|p| p * p).collect();
                Operator::Sparse(SparseOp {
                    m,
                    n,
                    col_ptr,
                    col_rows,
                    col_vals,
                    col_sq,
                    row_ptr,
                    row_cols,
                    row_vals,
                    row_sq,
                })
            }
        }
    }
}

/// Runs `$body` with `$op` bound to the concrete operator type.
macro_rules! with_operator {
    ($operator:expr, $op:ident => $body:expr) => {
        match $operator {
            $crate::solvers::operator::Operator::Dense($op) => $body,
            $crate::solvers::operator::Operator::Sparse($op) => $body,
        }
    };
}
pub(crate) use with_operator;
