//! Marginal baseline screeners: Pearson (SIS), Kendall tau (RCS) and
//! distance correlation (DCS).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kfilter::{ScreeningResult, VariableScore};
use crate::matrix::Matrix;
use crate::slicing::{Response, ResponseKind};
use crate::stats::{kendall_tau, pearson, CenteredDistances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMethod {
    Sis,
    Rcs,
    Dcs,
}

impl BaselineMethod {
    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::Sis => "sis",
            BaselineMethod::Rcs => "rcs",
            BaselineMethod::Dcs => "dcs",
        }
    }

    pub fn supports(self, kind: ResponseKind) -> bool {
        match self {
            BaselineMethod::Sis | BaselineMethod::Rcs => kind == ResponseKind::Continuous,
            BaselineMethod::Dcs => true,
        }
    }

    pub fn screen(self, x: &Matrix, resp: &Response, screen_size: usize) -> Result<ScreeningResult> {
        match (self, resp) {
            (BaselineMethod::Sis, Response::Continuous(y)) => sis_screen(x, y, screen_size),
            (BaselineMethod::Rcs, Response::Continuous(y)) => rcs_screen(x, y, screen_size),
            (BaselineMethod::Dcs, _) => dcs_screen(x, resp, screen_size),
            (m, _) => Err(Error::UnsupportedResponse {
                method: m.name().into(),
                required: "continuous",
            }),
        }
    }
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sis" => Ok(BaselineMethod::Sis),
            "rcs" => Ok(BaselineMethod::Rcs),
            "dcs" => Ok(BaselineMethod::Dcs),
            other => Err(Error::InvalidParameter(format!("unknown baseline method {other:?}"))),
        }
    }
}

fn check_shapes(x: &Matrix, n: usize, screen_size: usize) -> Result<()> {
    if x.nrows() != n {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: n,
        });
    }
    if screen_size > x.ncols() {
        return Err(Error::ScreenSizeTooLarge {
            d_n: screen_size,
            p: x.ncols(),
        });
    }
    Ok(())
}

/// Scores every column with `stat`, in parallel, stored by column index.
fn marginal_screen<F>(method: &str, x: &Matrix, screen_size: usize, stat: F) -> Result<ScreeningResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let scores = (0..x.ncols())
        .into_par_iter()
        .map(|j| {
            let col = x.column(j);
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { column: j, row });
            }
            let fused = match stat(col) {
                Ok(v) => v,
                Err(Error::DegenerateVariable) => 0.0,
                Err(e) => return Err(e),
            };
            Ok(VariableScore {
                index: j,
                fused,
                per_scheme: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ScreeningResult::from_scores(method, scores, screen_size, Vec::new())
}

fn check_response(y: &[f64]) -> Result<()> {
    match y.iter().position(|v| !v.is_finite()) {
        Some(row) => Err(Error::InvalidParameter(format!(
            "non-finite response value at observation {}",
            row + 1
        ))),
        None => Ok(()),
    }
}

/// Sure independence screening: rank by `|pearson(x_j, y)|`.
///
/// Constant columns score 0.
pub fn sis_screen(x: &Matrix, y: &[f64], screen_size: usize) -> Result<ScreeningResult> {
    check_shapes(x, y.len(), screen_size)?;
    check_response(y)?;
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateVariable);
    }
    marginal_screen("sis", x, screen_size, |c| pearson(c, y).map(f64::abs))
}

/// Rank correlation screening: rank by `|kendall_tau(x_j, y)|`.
pub fn rcs_screen(x: &Matrix, y: &[f64], screen_size: usize) -> Result<ScreeningResult> {
    check_shapes(x, y.len(), screen_size)?;
    check_response(y)?;
    marginal_screen("rcs", x, screen_size, |c| kendall_tau(c, y).map(f64::abs))
}

/// Distance correlation screening. Categorical responses are expanded to an
/// `n x levels` indicator matrix; counts are used as real numbers.
pub fn dcs_screen(x: &Matrix, resp: &Response, screen_size: usize) -> Result<ScreeningResult> {
    check_shapes(x, resp.len(), screen_size)?;
    resp.validate()?;
    let centered = match resp {
        Response::Categorical { values, levels } => {
            let dummies: Vec<Vec<f64>> = (1..=*levels)
                .map(|l| values.iter().map(|&v| if v == l { 1.0 } else { 0.0 }).collect())
                .collect();
            CenteredDistances::from_matrix(&Matrix::from_columns(&dummies)?)?
        }
        _ => CenteredDistances::from_vector(&resp.to_real())?,
    };
    let mut result = marginal_screen("dcs", x, screen_size, |c| centered.dcor(c).map(|d| d.value))?;
    if centered.is_degenerate() {
        result
            .warnings
            .push("response is constant; all distance correlations are 0".into());
    }
    Ok(result)
}
