//! Response slicing: turning a typed response into slice labels `H`.
//!
//! Continuous responses are cut at rank cutoffs `ceil(l n / G)`, so the
//! labels depend on the ranks of `y` only. Counts are truncated at `G - 1`;
//! categorical responses are their own labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{quantile_rank_thresholds, stable_order};

/// The kind of a response variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Continuous,
    Count,
    Categorical,
}

impl fmt::Display for ResponseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResponseKind::Continuous => "continuous",
            ResponseKind::Count => "count",
            ResponseKind::Categorical => "categorical",
        })
    }
}

impl FromStr for ResponseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(ResponseKind::Continuous),
            "count" => Ok(ResponseKind::Count),
            "categorical" => Ok(ResponseKind::Categorical),
            other => Err(Error::InvalidParameter(format!(
                "unknown response kind {other:?} (expected continuous, count or categorical)"
            ))),
        }
    }
}

/// A typed response vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Response {
    Continuous(Vec<f64>),
    Count(Vec<u64>),
    /// Class labels in `1..=levels`.
    Categorical { values: Vec<u32>, levels: u32 },
}

impl Response {
    pub fn len(&self) -> usize {
        match self {
            Response::Continuous(v) => v.len(),
            Response::Count(v) => v.len(),
            Response::Categorical { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ResponseKind {
        match self {
            Response::Continuous(_) => ResponseKind::Continuous,
            Response::Count(_) => ResponseKind::Count,
            Response::Categorical { .. } => ResponseKind::Categorical,
        }
    }

    /// The response as real numbers (class labels and counts converted).
    pub fn to_real(&self) -> Vec<f64> {
        match self {
            Response::Continuous(v) => v.clone(),
            Response::Count(v) => v.iter().map(|&c| c as f64).collect(),
            Response::Categorical { values, .. } => values.iter().map(|&c| f64::from(c)).collect(),
        }
    }

    /// Checks the per-kind invariants.
    pub fn validate(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "response needs at least 2 observations, got {}",
                self.len()
            )));
        }
        match self {
            Response::Continuous(v) => {
                if let Some(row) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite response value at observation {}",
                        row + 1
                    )));
                }
            }
            Response::Count(_) => {}
            Response::Categorical { values, levels } => {
                check_levels(values, *levels)?;
            }
        }
        Ok(())
    }
}

fn check_levels(values: &[u32], levels: u32) -> Result<()> {
    if levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "categorical response needs at least 2 levels, got {levels}"
        )));
    }
    if let Some(pos) = values.iter().position(|&v| v == 0 || v > levels) {
        return Err(Error::InvalidParameter(format!(
            "levels must be 1..{levels}; observation {} has level {}",
            pos + 1,
            values[pos]
        )));
    }
    Ok(())
}

/// Slice label for every observation, with per-slice counts.
///
/// Labels are zero-based (`0..slices`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceAssignment {
    labels: Vec<u16>,
    counts: Vec<usize>,
}

impl SliceAssignment {
    /// Builds an assignment from zero-based labels.
    pub fn from_labels(labels: Vec<u16>, slices: usize) -> Result<Self> {
        if slices < 2 {
            return Err(Error::InvalidParameter(format!(
                "at least 2 slices required, got {slices}"
            )));
        }
        if slices > usize::from(u16::MAX) {
            return Err(Error::InvalidParameter(format!("too many slices: {slices}")));
        }
        let mut counts = vec![0; slices];
        for &h in &labels {
            let h = usize::from(h);
            if h >= slices {
                return Err(Error::InvalidParameter(format!(
                    "slice label {h} out of range for {slices} slices"
                )));
            }
            counts[h] += 1;
        }
        Ok(SliceAssignment { labels, counts })
    }

    pub fn slices(&self) -> usize {
        self.counts.len()
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Zero-based indices of slices with no observations.
    pub fn empty_slices(&self) -> Vec<usize> {
        (0..self.slices()).filter(|&l| self.counts[l] == 0).collect()
    }

    pub fn nonempty_slices(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Fewer than two nonempty slices: the statistic is defined as 0.
    pub fn is_degenerate(&self) -> bool {
        self.nonempty_slices() < 2
    }
}

/// Uniform slicing of a continuous response into `slices` groups by rank.
pub fn assign_continuous(y: &[f64], slices: usize) -> Result<SliceAssignment> {
    let cutoffs = quantile_rank_thresholds(y.len(), slices)?;
    let order = stable_order(y)?;
    let mut labels = vec![0u16; y.len()];
    let mut slice = 0;
    for (pos, &i) in order.iter().enumerate() {
        while pos + 1 > cutoffs[slice] {
            slice += 1;
        }
        labels[i] = slice as u16;
    }
    SliceAssignment::from_labels(labels, slices)
}

/// Count slicing: `H = y + 1` for `y < G - 1`, otherwise `H = G` (one-based).
pub fn assign_count(y: &[u64], slices: usize) -> Result<SliceAssignment> {
    if slices < 2 {
        return Err(Error::InvalidParameter(format!(
            "at least 2 slices required, got {slices}"
        )));
    }
    let top = (slices - 1) as u64;
    let labels = y.iter().map(|&c| c.min(top) as u16).collect();
    SliceAssignment::from_labels(labels, slices)
}

/// Categorical slicing: `H = Y`, one slice per level.
pub fn assign_categorical(y: &[u32], levels: u32) -> Result<SliceAssignment> {
    check_levels(y, levels)?;
    let labels = y.iter().map(|&c| (c - 1) as u16).collect();
    SliceAssignment::from_labels(labels, levels as usize)
}

/// Default fusion grid `3, 4, ..., ceil(ln n)`.
pub fn default_slice_counts(n: usize) -> Result<Vec<usize>> {
    let top = (n as f64).ln().ceil() as usize;
    if top < 3 {
        return Err(Error::InvalidParameter(format!(
            "default slicing grid needs ceil(ln n) >= 3 (n >= 8), got n = {n}"
        )));
    }
    Ok((3..=top).collect())
}

/// The slicing schemes fused by the filter, one assignment per scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceGrid {
    slice_counts: Vec<usize>,
    assignments: Vec<SliceAssignment>,
}

impl SliceGrid {
    /// Wraps arbitrary assignments. Unlike [`build_grid`] this does not
    /// require distinct slice counts.
    pub fn from_assignments(assignments: Vec<SliceAssignment>) -> Result<Self> {
        if assignments.is_empty() {
            return Err(Error::InvalidParameter("slice grid is empty".into()));
        }
        let n = assignments[0].len();
        if let Some(a) = assignments.iter().find(|a| a.len() != n) {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: n,
            });
        }
        Ok(SliceGrid {
            slice_counts: assignments.iter().map(SliceAssignment::slices).collect(),
            assignments,
        })
    }

    pub fn single(assignment: SliceAssignment) -> Self {
        SliceGrid {
            slice_counts: vec![assignment.slices()],
            assignments: vec![assignment],
        }
    }

    pub fn slice_counts(&self) -> &[usize] {
        &self.slice_counts
    }

    pub fn assignments(&self) -> &[SliceAssignment] {
        &self.assignments
    }

    /// Number of fused schemes.
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Number of observations each assignment covers.
    pub fn observations(&self) -> usize {
        self.assignments[0].len()
    }
}

/// Builds the fusion grid for `resp`.
///
/// Continuous and count responses default to `3..=ceil(ln n)`; categorical
/// responses always use the single assignment `H = Y`.
pub fn build_grid(resp: &Response, slice_counts: Option<&[usize]>) -> Result<SliceGrid> {
    resp.validate()?;
    let n = resp.len();
    if let Response::Categorical { values, levels } = resp {
        if slice_counts.is_some_and(|g| g != [*levels as usize]) {
            return Err(Error::InvalidParameter(format!(
                "categorical responses are sliced by level ({levels} slices); explicit slice counts are not accepted"
            )));
        }
        return Ok(SliceGrid::single(assign_categorical(values, *levels)?));
    }
    let counts = match slice_counts {
        Some(g) => {
            if g.is_empty() {
                return Err(Error::InvalidParameter("empty slice-count list".into()));
            }
            if g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "slice counts must be strictly increasing, got {g:?}"
                )));
            }
            if let Some(&bad) = g.iter().find(|&&s| s < 2) {
                return Err(Error::InvalidParameter(format!(
                    "at least 2 slices required, got {bad}"
                )));
            }
            if let Some(&bad) = g.iter().find(|&&s| s > n) {
                return Err(Error::TooManySlices { slices: bad, n });
            }
            g.to_vec()
        }
        None => default_slice_counts(n)?,
    };
    let assignments = counts
        .iter()
        .map(|&g| match resp {
            Response::Continuous(y) => assign_continuous(y, g),
            Response::Count(y) => assign_count(y, g),
            Response::Categorical { .. } => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SliceGrid {
        slice_counts: counts,
        assignments,
    })
}
