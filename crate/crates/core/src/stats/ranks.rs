use crate::error::{Error, Result};

/// Observation indices in ascending order of value, ties broken by index.
pub fn stable_order(values: &[f64]) -> Result<Vec<usize>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NanInSample);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    // `sort_by` is stable, so equal values keep index order.
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(order)
}

/// Ranks `1..=n` assigned by ascending value, ties broken by original index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector {
    ranks: Vec<usize>,
}

impl RankVector {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let order = stable_order(values)?;
        let mut ranks = vec![0; values.len()];
        for (pos, &i) in order.iter().enumerate() {
            ranks[i] = pos + 1;
        }
        Ok(RankVector { ranks })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

/// Cumulative rank cutoffs `ceil(l * n / G)` for `l = 1..=G`.
///
/// An observation of rank `r` falls in slice `l` iff `c[l-1] < r <= c[l]`,
/// with `c[0] = 0`.
pub fn quantile_rank_thresholds(n: usize, slices: usize) -> Result<Vec<usize>> {
    if slices < 2 {
        return Err(Error::InvalidParameter(format!(
            "at least 2 slices required, got {slices}"
        )));
    }
    if slices > n {
        return Err(Error::TooManySlices { slices, n });
    }
    Ok((1..=slices).map(|l| (l * n).div_ceil(slices)).collect())
}
