//! Seeded generators for the simulation models.
//!
//! | id | covariates | response | active set |
//! |----|-----------|----------|------------|
//! | 1a, 1b, 1c | `W ~ N(0, CS(0.7))` | `W'b + e`, `b = 2.8 (1, -1, 0, ...)` | {1, 2} |
//! | 2a, 2b, 2c | `W ~ N(0, AR(0.7))` | `W'b + e`, `b = 0.8 (1_10, 0, ...)` | {1..10} |
//! | 3 | iid Cauchy | `(X1 + X2 + 1)^3 + e` | {1, 2} |
//! | 4 | iid Uniform(0, 1) | `4 X1 + 2 tan(pi X2 / 2) + 5 X3^2 + e` | {1, 2, 3} |
//! | 5 | `N(0, AR(0.8))` | `2 (X1 + .8 X2 + .6 X3 + .4 X4 + .2 X5) + exp(X20 + X21 + X22) e` | {1..5, 20, 21, 22} |
//! | 6 | iid t_2 | `Poisson(exp(0.8 X1 - 0.8 X2))` | {1, 2} |
//! | 7 | class-dependent mixtures, Cauchy otherwise | uniform on {1..5} | {1..10} |
//!
//! Variant (b) transforms covariates (`W^9` for model 1, `exp(2W)` for model
//! 2); variant (c) transforms the response (`(.)^9`, `exp(.)`). The three
//! variants of a family consume the random stream identically, so the same
//! seed yields the same latent draws.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{bimodal_mixture, cauchy, normal, poisson, rng_from_seed, student_t2, uniform, SimRng};
use crate::slicing::Response;

/// Poisson means are capped at `exp(50)`.
pub const POISSON_LOG_MEAN_CAP: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelId {
    #[serde(rename = "1a")]
    M1a,
    #[serde(rename = "1b")]
    M1b,
    #[serde(rename = "1c")]
    M1c,
    #[serde(rename = "2a")]
    M2a,
    #[serde(rename = "2b")]
    M2b,
    #[serde(rename = "2c")]
    M2c,
    #[serde(rename = "3")]
    M3,
    #[serde(rename = "4")]
    M4,
    #[serde(rename = "5")]
    M5,
    #[serde(rename = "6")]
    M6,
    #[serde(rename = "7")]
    M7,
}

impl ModelId {
    pub const ALL: [ModelId; 11] = [
        ModelId::M1a,
        ModelId::M1b,
        ModelId::M1c,
        ModelId::M2a,
        ModelId::M2b,
        ModelId::M2c,
        ModelId::M3,
        ModelId::M4,
        ModelId::M5,
        ModelId::M6,
        ModelId::M7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::M1a => "1a",
            ModelId::M1b => "1b",
            ModelId::M1c => "1c",
            ModelId::M2a => "2a",
            ModelId::M2b => "2b",
            ModelId::M2c => "2c",
            ModelId::M3 => "3",
            ModelId::M4 => "4",
            ModelId::M5 => "5",
            ModelId::M6 => "6",
            ModelId::M7 => "7",
        }
    }

    /// Smallest `p` that holds the model's active variables.
    pub fn min_p(self) -> usize {
        match self {
            ModelId::M1a | ModelId::M1b | ModelId::M1c | ModelId::M3 | ModelId::M6 => 2,
            ModelId::M2a | ModelId::M2b | ModelId::M2c | ModelId::M7 => 10,
            ModelId::M4 => 3,
            ModelId::M5 => 22,
        }
    }

    /// Zero-based active set.
    pub fn truth(self) -> Vec<usize> {
        match self {
            ModelId::M1a | ModelId::M1b | ModelId::M1c | ModelId::M3 | ModelId::M6 => vec![0, 1],
            ModelId::M2a | ModelId::M2b | ModelId::M2c | ModelId::M7 => (0..10).collect(),
            ModelId::M4 => vec![0, 1, 2],
            ModelId::M5 => vec![0, 1, 2, 3, 4, 19, 20, 21],
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().trim_start_matches("model").trim();
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(key))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub id: ModelId,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(id: ModelId, n: usize, p: usize, seed: u64) -> Self {
        ModelSpec { id, n, p, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::InvalidParameter(format!(
                "model {} needs n >= 8, got {}",
                self.id, self.n
            )));
        }
        if self.p < self.id.min_p() {
            return Err(Error::InvalidParameter(format!(
                "model {} needs p >= {}, got {}",
                self.id,
                self.id.min_p(),
                self.p
            )));
        }
        Ok(())
    }
}

/// Covariates, response and (when known) the active set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub response: Response,
    /// Zero-based indices of the active variables; empty when unknown.
    pub truth: Vec<usize>,
    pub label: String,
    pub column_names: Vec<String>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

pub fn default_column_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

/// Draws one observation row of a latent normal vector into `w`.
fn compound_symmetry_row(rng: &mut SimRng, rho: f64, w: &mut [f64]) {
    let shared = rho.sqrt() * normal(rng);
    let own = (1.0 - rho).sqrt();
    for v in w.iter_mut() {
        *v = shared + own * normal(rng);
    }
}

fn ar1_row(rng: &mut SimRng, rho: f64, w: &mut [f64]) {
    let innov = (1.0 - rho * rho).sqrt();
    let mut prev = normal(rng);
    w[0] = prev;
    for v in w.iter_mut().skip(1) {
        prev = rho * prev + innov * normal(rng);
        *v = prev;
    }
}

fn fill_rows(
    spec: &ModelSpec,
    rng: &mut SimRng,
    mut row: impl FnMut(&mut SimRng, &mut [f64]) -> f64,
) -> (Matrix, Vec<f64>) {
    let mut x = Matrix::zeros(spec.n, spec.p);
    let mut buf = vec![0.0; spec.p];
    let mut y = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        y.push(row(rng, &mut buf));
        for (j, &v) in buf.iter().enumerate() {
            x.set(i, j, v);
        }
    }
    (x, y)
}

/// Generates the dataset described by `spec`; a pure function of `spec`.
pub fn generate(spec: &ModelSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let rng = &mut rng;
    let (x, response) = match spec.id {
        ModelId::M1a | ModelId::M1b | ModelId::M1c => {
            let (w, y) = fill_rows(spec, rng, |rng, w| {
                compound_symmetry_row(rng, 0.7, w);
                2.8 * (w[0] - w[1]) + normal(rng)
            });
            match spec.id {
                ModelId::M1a => (w, y),
                ModelId::M1b => (w.map(|v| v.powi(9)), y),
                _ => (w, y.into_iter().map(|v| v.powi(9)).collect()),
            }
        }
        ModelId::M2a | ModelId::M2b | ModelId::M2c => {
            let (w, y) = fill_rows(spec, rng, |rng, w| {
                ar1_row(rng, 0.7, w);
                0.8 * w[..10].iter().sum::<f64>() + normal(rng)
            });
            match spec.id {
                ModelId::M2a => (w, y),
                ModelId::M2b => (w.map(|v| (2.0 * v).exp()), y),
                _ => (w, y.into_iter().map(f64::exp).collect()),
            }
        }
        ModelId::M3 => fill_rows(spec, rng, |rng, w| {
            w.iter_mut().for_each(|v| *v = cauchy(rng));
            (w[0] + w[1] + 1.0).powi(3) + normal(rng)
        }),
        ModelId::M4 => fill_rows(spec, rng, |rng, w| {
            w.iter_mut().for_each(|v| *v = uniform(rng));
            let half_pi = std::f64::consts::FRAC_PI_2;
            4.0 * w[0] + 2.0 * (half_pi * w[1]).tan() + 5.0 * w[2] * w[2] + normal(rng)
        }),
        ModelId::M5 => fill_rows(spec, rng, |rng, w| {
            ar1_row(rng, 0.8, w);
            let mean = 2.0 * (w[0] + 0.8 * w[1] + 0.6 * w[2] + 0.4 * w[3] + 0.2 * w[4]);
            mean + (w[19] + w[20] + w[21]).exp() * normal(rng)
        }),
        ModelId::M6 => {
            let mut counts = Vec::with_capacity(spec.n);
            let (x, _) = fill_rows(spec, rng, |rng, w| {
                w.iter_mut().for_each(|v| *v = student_t2(rng));
                let eta = (0.8 * w[0] - 0.8 * w[1]).min(POISSON_LOG_MEAN_CAP);
                counts.push(poisson(rng, eta.exp()));
                0.0
            });
            return finish(spec, x, Response::Count(counts));
        }
        ModelId::M7 => {
            let mut classes = Vec::with_capacity(spec.n);
            let (x, _) = fill_rows(spec, rng, |rng, w| {
                let g = (uniform(rng) * 5.0) as usize;
                for (j, v) in w.iter_mut().enumerate() {
                    *v = if j / 2 == g { bimodal_mixture(rng) } else { cauchy(rng) };
                }
                classes.push(g as u32 + 1);
                0.0
            });
            return finish(
                spec,
                x,
                Response::Categorical {
                    values: classes,
                    levels: 5,
                },
            );
        }
    };
    finish(spec, x, Response::Continuous(response))
}

fn finish(spec: &ModelSpec, x: Matrix, response: Response) -> Result<Dataset> {
    Ok(Dataset {
        x,
        response,
        truth: spec.id.truth(),
        label: format!("model {}", spec.id),
        column_names: default_column_names(spec.p),
    })
}
