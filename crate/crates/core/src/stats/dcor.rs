use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sample distance correlation and whether a degenerate (constant) input
/// forced the zero convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceCorrelation {
    pub value: f64,
    pub degenerate: bool,
}

impl DistanceCorrelation {
    const DEGENERATE: DistanceCorrelation = DistanceCorrelation {
        value: 0.0,
        degenerate: true,
    };
}

/// Doubly-centered Euclidean distance matrix of a response, built once and
/// reused against every covariate column.
#[derive(Debug, Clone)]
pub struct CenteredDistances {
    n: usize,
    centered: Vec<f64>,
    dvar2: f64,
}

impl CenteredDistances {
    /// Rows of `y` are observations; columns are response coordinates.
    pub fn from_matrix(y: &Matrix) -> Result<Self> {
        let n = y.nrows();
        if n < 4 {
            return Err(Error::InvalidParameter(format!(
                "distance correlation needs at least 4 observations, got {n}"
            )));
        }
        if y.ncols() == 0 {
            return Err(Error::InvalidParameter("response has no columns".into()));
        }
        if let Some((row, column)) = y.find_non_finite() {
            return Err(Error::NonFinite { column, row });
        }
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let s: f64 = y
                    .columns()
                    .map(|c| (c[i] - c[j]) * (c[i] - c[j]))
                    .sum();
                let v = s.sqrt();
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let rows: Vec<f64> = (0..n).map(|i| d[i * n..(i + 1) * n].iter().sum()).collect();
        let total: f64 = rows.iter().sum();
        let nf = n as f64;
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] += total / (nf * nf) - rows[i] / nf - rows[j] / nf;
            }
        }
        let dvar2 = d.iter().map(|v| v * v).sum::<f64>() / (nf * nf);
        Ok(CenteredDistances {
            n,
            centered: d,
            dvar2,
        })
    }

    pub fn from_vector(y: &[f64]) -> Result<Self> {
        Self::from_matrix(&Matrix::from_column_major(y.len(), 1, y.to_vec())?)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// True for a constant response.
    pub fn is_degenerate(&self) -> bool {
        self.dvar2.is_nan() || self.dvar2 <= 0.0
    }

    /// Distance correlation between scalar covariate `x` and this response.
    ///
    /// Uses `sum_ij A_ij B_ij = sum_ij a_ij B_ij` (B has zero row and column
    /// sums), so the covariate's distance matrix never needs to be stored.
    pub fn dcor(&self, x: &[f64]) -> Result<DistanceCorrelation> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: n,
            });
        }
        if let Some(row) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { column: 0, row });
        }
        let mut rows = vec![0.0; n];
        let (mut cross, mut sq) = (0.0, 0.0);
        for i in 0..n {
            let b = &self.centered[i * n..(i + 1) * n];
            let xi = x[i];
            for j in i + 1..n {
                let a = (xi - x[j]).abs();
                cross += a * b[j];
                sq += a * a;
                rows[i] += a;
                rows[j] += a;
            }
        }
        let nf = n as f64;
        let total: f64 = rows.iter().sum();
        let rows_sq: f64 = rows.iter().map(|r| r * r).sum();
        let dcov2 = 2.0 * cross / (nf * nf);
        let dvar2_x = (2.0 * sq - 2.0 * rows_sq / nf + total * total / (nf * nf)) / (nf * nf);
        let denom = dvar2_x * self.dvar2;
        if denom.is_nan() || denom <= 0.0 {
            return Ok(DistanceCorrelation::DEGENERATE);
        }
        let r2 = (dcov2 / denom.sqrt()).clamp(0.0, 1.0);
        Ok(DistanceCorrelation {
            value: r2.sqrt(),
            degenerate: false,
        })
    }
}

/// Sample distance correlation of scalar `x` with the `n x q` response `y`.
///
/// Constant `x` or constant `y` yields 0 with `degenerate` set.
pub fn distance_correlation(x: &[f64], y: &Matrix) -> Result<DistanceCorrelation> {
    if x.len() != y.nrows() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.nrows(),
        });
    }
    CenteredDistances::from_matrix(y)?.dcor(x)
}
