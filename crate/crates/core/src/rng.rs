//! Seeded random streams and the samplers used by the simulation models.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha::ChaCha8Rng`) seeded
//! from a 64-bit value. Replicate seeds are derived from a master seed with
//! the SplitMix64 finalizer, so replicate `r` sees the same stream no matter
//! which thread runs it.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use libm::lgamma as ln_gamma;

use crate::error::{Error, Result};

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

#[inline]
pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard Cauchy by inversion, `tan(pi (u - 1/2))`.
#[inline]
pub fn cauchy(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Student t with 2 degrees of freedom, `Z / sqrt(chi2_2 / 2)`; `chi2_2 / 2`
/// is a unit exponential.
#[inline]
pub fn student_t2(rng: &mut impl Rng) -> f64 {
    let z = normal(rng);
    let e: f64 = rng.sample(Exp1);
    z / e.sqrt()
}

#[inline]
pub fn uniform(rng: &mut impl Rng) -> f64 {
    rng.random()
}

/// Equal mixture `0.5 N(3, 0.3^2) + 0.5 N(-3, 0.3^2)`.
#[inline]
pub fn bimodal_mixture(rng: &mut impl Rng) -> f64 {
    let centre = if rng.random::<bool>() { 3.0 } else { -3.0 };
    centre + 0.3 * normal(rng)
}

/// Above this mean the Poisson draw uses a rounded normal approximation;
/// the rejection step's log-likelihood terms lose precision beyond it.
const POISSON_NORMAL_APPROX: f64 = 1e7;

/// Poisson draw: inversion for `mean <= 10`, transformed rejection (PTRS)
/// above. Results beyond `u64::MAX` saturate.
pub fn poisson(rng: &mut impl Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean <= 10.0 {
        let mut k = 0u64;
        let mut prob = (-mean).exp();
        let mut cdf = prob;
        let u: f64 = rng.random();
        while u > cdf {
            k += 1;
            prob *= mean / k as f64;
            cdf += prob;
            if prob <= 0.0 {
                break;
            }
        }
        return k;
    }
    if mean > POISSON_NORMAL_APPROX {
        return (mean + mean.sqrt() * normal(rng)).round().max(0.0) as u64;
    }
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -mean + k * loglam - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}

/// Distribution selector for [`rng_draws`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DrawKind {
    Normal,
    Cauchy,
    T2,
    Uniform,
    Poisson(f64),
    Mixture,
}

impl fmt::Display for DrawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DrawKind::Normal => f.write_str("normal"),
            DrawKind::Cauchy => f.write_str("cauchy"),
            DrawKind::T2 => f.write_str("t2"),
            DrawKind::Uniform => f.write_str("uniform"),
            DrawKind::Poisson(m) => write!(f, "poisson({m})"),
            DrawKind::Mixture => f.write_str("mixture"),
        }
    }
}

impl FromStr for DrawKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "normal" => DrawKind::Normal,
            "cauchy" => DrawKind::Cauchy,
            "t2" => DrawKind::T2,
            "uniform" => DrawKind::Uniform,
            "mixture" => DrawKind::Mixture,
            _ => {
                let mean = s
                    .strip_prefix("poisson(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|m| m.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution {s:?}")))?;
                DrawKind::Poisson(mean)
            }
        };
        Ok(kind)
    }
}

/// `n` iid draws of `kind` from the stream seeded by `seed`.
pub fn rng_draws(kind: DrawKind, seed: u64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one draw required".into()));
    }
    if let DrawKind::Poisson(m) = kind {
        if !m.is_finite() || m < 0.0 {
            return Err(Error::InvalidParameter(format!("Poisson mean must be finite and >= 0, got {m}")));
        }
    }
    let mut rng = rng_from_seed(seed);
    Ok((0..n)
        .map(|_| match kind {
            DrawKind::Normal => normal(&mut rng),
            DrawKind::Cauchy => cauchy(&mut rng),
            DrawKind::T2 => student_t2(&mut rng),
            DrawKind::Uniform => uniform(&mut rng),
            DrawKind::Poisson(m) => poisson(&mut rng, m) as f64,
            DrawKind::Mixture => bimodal_mixture(&mut rng),
        })
        .collect())
}
