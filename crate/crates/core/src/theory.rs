//! Closed-form population values under the Gaussian-copula model and the
//! marginal signal vector `alpha = Sigma * beta` of the transformation
//! linear model.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{adaptive_quadrature, normal_cdf, normal_pdf, normal_quantile};

/// Lower integration limit standing in for `-inf`; the normal mass below it
/// is about `7.6e-24`.
const LOWER_LIMIT: f64 = -10.0;

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_nan() || rho.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "correlation must satisfy |rho| < 1, got {rho}"
        )));
    }
    Ok(())
}

/// Population single-scheme statistic for a bivariate Gaussian copula with
/// correlation `rho`, response sliced at its `l/G` quantiles:
///
/// `G * int_{-inf}^{q} (2 Phi(-|rho| y / sqrt(1 - rho^2)) - 1) phi(y) dy`,
/// with `q = Phi^{-1}(1/G)`.
///
/// The maximal pair is always the first and last slice, compared at `x = 0`.
pub fn oracle_kg_normal(rho: f64, slices: usize, tol: f64) -> Result<f64> {
    check_rho(rho)?;
    if slices < 2 {
        return Err(Error::InvalidParameter(format!(
            "at least 2 slices required, got {slices}"
        )));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let g = slices as f64;
    let upper = normal_quantile(1.0 / g);
    let r = rho.abs();
    let s = (1.0 - rho * rho).sqrt();
    let integrand = |y: f64| (2.0 * normal_cdf(-r * y / s) - 1.0) * normal_pdf(y);
    let integral = adaptive_quadrature(integrand, LOWER_LIMIT, upper, tol / g)?;
    Ok((g * integral).clamp(0.0, 1.0))
}

/// Unsliced limit statistic under the Gaussian copula: 1 for any nonzero
/// correlation, 0 otherwise.
pub fn kstar_normal(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(if rho != 0.0 { 1.0 } else { 0.0 })
}

/// Covariance structure of the latent normal covariates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceKind {
    Identity,
    /// Unit diagonal, constant off-diagonal `rho`.
    CompoundSymmetry { rho: f64 },
    /// `Sigma_ij = rho^|i-j|`.
    Ar1 { rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub kind: CovarianceKind,
    pub p: usize,
}

impl fmt::Display for CovarianceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CovarianceKind::Identity => write!(f, "I({})", self.p),
            CovarianceKind::CompoundSymmetry { rho } => write!(f, "CS({rho}), p = {}", self.p),
            CovarianceKind::Ar1 { rho } => write!(f, "AR({rho}), p = {}", self.p),
        }
    }
}

impl CovarianceSpec {
    pub fn identity(p: usize) -> Self {
        CovarianceSpec {
            kind: CovarianceKind::Identity,
            p,
        }
    }

    pub fn compound_symmetry(rho: f64, p: usize) -> Self {
        CovarianceSpec {
            kind: CovarianceKind::CompoundSymmetry { rho },
            p,
        }
    }

    pub fn ar1(rho: f64, p: usize) -> Self {
        CovarianceSpec {
            kind: CovarianceKind::Ar1 { rho },
            p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidParameter("dimension p must be positive".into()));
        }
        match self.kind {
            CovarianceKind::Identity => Ok(()),
            CovarianceKind::Ar1 { rho } => check_rho(rho),
            CovarianceKind::CompoundSymmetry { rho } => {
                check_rho(rho)?;
                if self.p > 1 && rho <= -1.0 / (self.p as f64 - 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "CS({rho}) is not positive definite for p = {}",
                        self.p
                    )));
                }
                Ok(())
            }
        }
    }

    /// Entry `Sigma_ij` (zero-based).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        match self.kind {
            CovarianceKind::Identity => 0.0,
            CovarianceKind::CompoundSymmetry { rho } => rho,
            CovarianceKind::Ar1 { rho } => rho.powi(i.abs_diff(j) as i32),
        }
    }
}

/// `alpha = Sigma * beta` in `O(p)` using the covariance structure.
pub fn alpha_vector(sigma: &CovarianceSpec, beta: &[f64]) -> Result<Vec<f64>> {
    sigma.validate()?;
    if beta.len() != sigma.p {
        return Err(Error::LengthMismatch {
            left: beta.len(),
            right: sigma.p,
        });
    }
    Ok(match sigma.kind {
        CovarianceKind::Identity => beta.to_vec(),
        CovarianceKind::CompoundSymmetry { rho } => {
            let total: f64 = beta.iter().sum();
            beta.iter().map(|b| (1.0 - rho) * b + rho * total).collect()
        }
        CovarianceKind::Ar1 { rho } => {
            // alpha_j = sum_{i<=j} rho^(j-i) beta_i + sum_{i>j} rho^(i-j) beta_i
            let p = beta.len();
            let mut out = vec![0.0; p];
            let mut left = 0.0;
            for j in 0..p {
                left = rho * left + beta[j];
                out[j] = left;
            }
            let mut right = 0.0;
            for j in (0..p.saturating_sub(1)).rev() {
                right = rho * (right + beta[j + 1]);
                out[j] += right;
            }
            out
        }
    })
}

/// Outcome of the separation check on `|alpha|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C1Report {
    /// Zero-based indices of the separating set, ascending.
    pub set: Vec<usize>,
    /// `min_{j in S} |alpha_j| - max_{j not in S} |alpha_j|`.
    pub margin: f64,
    pub alpha: Vec<f64>,
    /// For AR covariance with support `{1..d}`: the analytic size
    /// `d + ceil(log(min_D |alpha_j| / |alpha_d|) / log |rho|)` of a
    /// separating prefix.
    pub ar_bound: Option<usize>,
}

/// Smallest set `S` containing the support of `beta` such that every
/// `|alpha_j|` inside `S` strictly exceeds every one outside.
pub fn condition_c1_set(sigma: &CovarianceSpec, beta: &[f64]) -> Result<C1Report> {
    let alpha = alpha_vector(sigma, beta)?;
    let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
    if support.is_empty() {
        return Err(Error::InvalidParameter("beta has empty support".into()));
    }
    let mut order: Vec<usize> = (0..alpha.len()).collect();
    order.sort_by(|&a, &b| alpha[b].abs().total_cmp(&alpha[a].abs()));
    let mut position = vec![0; alpha.len()];
    for (k, &j) in order.iter().enumerate() {
        position[j] = k;
    }
    let deepest = support.iter().map(|&j| position[j]).max().unwrap_or(0);
    let size = (deepest + 1..alpha.len())
        .find(|&k| alpha[order[k - 1]].abs() > alpha[order[k]].abs())
        .ok_or(Error::C1Unverifiable)?;
    let mut set = order[..size].to_vec();
    set.sort_unstable();
    let margin = alpha[order[size - 1]].abs() - alpha[order[size]].abs();
    let ar_bound = match sigma.kind {
        CovarianceKind::Ar1 { rho } => ar_separating_bound(rho, beta, &alpha),
        _ => None,
    };
    Ok(C1Report {
        set,
        margin,
        alpha,
        ar_bound,
    })
}

/// Analytic separating-prefix size for AR covariance; `None` unless `beta`
/// is nonzero exactly on a leading block `{1..d}` with nonzero `alpha` there.
fn ar_separating_bound(rho: f64, beta: &[f64], alpha: &[f64]) -> Option<usize> {
    let d = beta.iter().position(|&b| b == 0.0).unwrap_or(beta.len());
    if d == 0 || beta[d..].iter().any(|&b| b != 0.0) {
        return None;
    }
    let min_active = alpha[..d].iter().map(|a| a.abs()).fold(f64::INFINITY, f64::min);
    if min_active.is_nan() || min_active <= 0.0 {
        return None;
    }
    if rho == 0.0 {
        return Some(d);
    }
    let extra = ((min_active / alpha[d - 1].abs()).ln() / rho.abs().ln()).ceil();
    Some(d + extra.max(0.0) as usize)
}
