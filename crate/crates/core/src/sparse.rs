//! Real-valued compressed-sparse-row matrices acting on complex vectors.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Rows below this size are multiplied serially.
const PARALLEL_ROWS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from per-row `(column, value)` lists. Duplicate columns
    /// within a row are summed and each row is sorted by column.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n_rows = rows.len();
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if c >= n_cols {
                    return Err(Error::DimensionMismatch {
                        expected: n_cols,
                        actual: c + 1,
                    });
                }
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: vec![0; n + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    /// Copy with the diagonal removed.
    pub fn off_diagonal(&self) -> Self {
        let rows = (0..self.n_rows)
            .map(|i| self.row(i).filter(|&(c, _)| c != i).collect())
            .collect();
        Self::from_rows(self.n_cols, rows).expect("columns already validated")
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n_cols];
        for i in 0..self.n_rows {
            for (c, v) in self.row(i) {
                rows[c].push((i, v));
            }
        }
        Self::from_rows(self.n_rows, rows).expect("columns already validated")
    }

    /// `Aᵀ A`, accumulated row by row.
    pub fn gram(&self) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n_cols];
        for i in 0..self.n_rows {
            let entries: Vec<_> = self.row(i).collect();
            for &(c1, v1) in &entries {
                for &(c2, v2) in &entries {
                    rows[c1].push((c2, v1 * v2));
                }
            }
        }
        Self::from_rows(self.n_cols, rows).expect("columns already validated")
    }

    /// Sum of two matrices with matching shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows,
                actual: other.n_rows,
            });
        }
        let rows = (0..self.n_rows)
            .map(|i| self.row(i).chain(other.row(i)).collect())
            .collect();
        Self::from_rows(self.n_cols, rows)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n_rows).all(|i| self.row(i).all(|(c, _)| c == i))
    }

    /// Largest absolute asymmetry `|A[i][j] − A[j][i]|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n_rows {
            for (c, v) in self.row(i) {
                worst = worst.max((v - self.get(c, i)).abs());
            }
        }
        worst
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum of a symmetric matrix.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n_rows {
            let mut centre = 0.0;
            let mut radius = 0.0;
            for (c, v) in self.row(i) {
                if c == i {
                    centre += v;
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        if self.n_rows == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        let row_kernel = |(i, yi): (usize, &mut Complex64)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += x[self.col_indices[k]] * self.values[k];
            }
            *yi = acc;
        };
        if self.n_rows >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(row_kernel);
        } else {
            y.iter_mut().enumerate().for_each(row_kernel);
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n_rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for (c, v) in self.row(i) {
                m[(i, c)] += v;
            }
        }
        m
    }
}
