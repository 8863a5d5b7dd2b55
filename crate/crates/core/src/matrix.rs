use crate::error::{Error, Result};

/// Dense column-major `n x p` matrix.
///
/// Screening works one variable at a time, so each column is a contiguous
/// slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    /// Builds a matrix from column-major storage.
    pub fn from_column_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: nrows * ncols,
            });
        }
        Ok(Matrix { nrows, ncols, data })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let ncols = columns.len();
        let nrows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for c in columns {
            if c.len() != nrows {
                return Err(Error::LengthMismatch {
                    left: c.len(),
                    right: nrows,
                });
            }
            data.extend_from_slice(c);
        }
        Ok(Matrix { nrows, ncols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(Error::LengthMismatch {
                    left: r.len(),
                    right: ncols,
                });
            }
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.nrows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.nrows + row] = value;
    }

    #[inline]
    pub fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.nrows..(col + 1) * self.nrows]
    }

    #[inline]
    pub fn column_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.nrows..(col + 1) * self.nrows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.ncols).map(move |j| self.column(j))
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.ncols).map(|j| self.get(row, j)).collect()
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    /// Applies `f` to every entry.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// First non-finite entry, as `(row, column)`.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|k| (k % self.nrows.max(1), k / self.nrows.max(1)))
    }

    /// Selects a subset of rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), self.ncols);
        for j in 0..self.ncols {
            let src = self.column(j);
            for (dst, &i) in out.column_mut(j).iter_mut().zip(rows) {
                *dst = src[i];
            }
        }
        out
    }
}
