use crate::error::{Error, Result};

/// A non-empty, NaN-free sample stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NanInSample);
        }
        values.sort_by(f64::total_cmp);
        Ok(SortedSample { values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of sample points `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v <= x)
    }

    /// Right-continuous empirical CDF evaluated at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.values.len() as f64
    }
}

/// Empirical CDF `#{v <= x} / n` of a sorted sample.
pub fn empirical_cdf(sample: &SortedSample, x: f64) -> f64 {
    sample.cdf(x)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
///
/// Single merged pass over both sorted samples. The supremum is evaluated
/// after all points tied at a value have been consumed, so the step functions
/// are compared exactly at the union of sample points.
pub fn ks_two_sample(a: &SortedSample, b: &SortedSample) -> f64 {
    let (a, b) = (a.values(), b.values());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    // Once either sample is exhausted its CDF is 1 and the gap can only shrink.
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        let gap = (i as f64 / na - j as f64 / nb).abs();
        if gap > d {
            d = gap;
        }
    }
    d
}
