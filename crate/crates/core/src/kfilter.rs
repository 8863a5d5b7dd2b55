//! The (fused) Kolmogorov filter.
//!
//! For one slicing scheme the statistic of a covariate is the largest
//! two-sample Kolmogorov-Smirnov distance between any two slice-conditional
//! empirical CDFs. The fused statistic sums it over all schemes of a grid,
//! and screening keeps the `d_n` variables with the largest fused values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::slicing::{build_grid, Response, SliceAssignment, SliceGrid};

/// Default screening size `ceil(n / ln n)`.
pub fn default_screen_size(n: usize) -> usize {
    if n < 3 {
        return n;
    }
    (n as f64 / (n as f64).ln()).ceil() as usize
}

/// Options for [`screen`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterConfig {
    /// Explicit slice counts; `None` uses the default grid for the response.
    pub slice_counts: Option<Vec<usize>>,
    /// Number of variables to keep; `None` means `min(ceil(n / ln n), p)`.
    pub screen_size: Option<usize>,
    /// Keep every per-scheme statistic alongside the fused sum.
    pub record_per_scheme: bool,
}

/// Statistic of a single variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableScore {
    /// Zero-based column index.
    pub index: usize,
    pub fused: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_scheme: Option<Vec<f64>>,
}

/// Scores for all variables plus the ranking and selected set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningResult {
    pub method: String,
    /// One entry per variable, in column order.
    pub scores: Vec<VariableScore>,
    /// Column indices by descending statistic, ties by ascending index.
    pub ranking: Vec<usize>,
    /// The first `d_n` entries of `ranking`.
    pub selected: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ScreeningResult {
    /// Ranks `scores` (larger is stronger) and keeps the top `screen_size`.
    pub fn from_scores(
        method: impl Into<String>,
        scores: Vec<VariableScore>,
        screen_size: usize,
        warnings: Vec<String>,
    ) -> Result<Self> {
        let p = scores.len();
        if screen_size > p {
            return Err(Error::ScreenSizeTooLarge { d_n: screen_size, p });
        }
        if screen_size == 0 {
            return Err(Error::InvalidParameter("d_n must be at least 1".into()));
        }
        let ranking = rank_descending(scores.iter().map(|s| s.fused));
        let selected = ranking[..screen_size].to_vec();
        Ok(ScreeningResult {
            method: method.into(),
            scores,
            ranking,
            selected,
            warnings,
        })
    }

    pub fn statistics(&self) -> Vec<f64> {
        self.scores.iter().map(|s| s.fused).collect()
    }

    /// One-based position of each variable in the ranking.
    pub fn rank_positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.ranking.len()];
        for (k, &j) in self.ranking.iter().enumerate() {
            pos[j] = k + 1;
        }
        pos
    }
}

/// Indices ordered by descending value; equal values keep ascending index.
pub fn rank_descending(values: impl Iterator<Item = f64>) -> Vec<usize> {
    let v: Vec<f64> = values.collect();
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    idx
}

/// A covariate column sorted once, reusable across slicing schemes.
struct SortedColumn {
    order: Vec<u32>,
    /// `run_end[k]` is true when position `k` is the last of a run of equal values.
    run_end: Vec<bool>,
}

impl SortedColumn {
    fn new(x: &[f64]) -> Self {
        let mut order: Vec<u32> = (0..x.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| x[a as usize].total_cmp(&x[b as usize]));
        let run_end = (0..order.len())
            .map(|k| k + 1 == order.len() || x[order[k] as usize] != x[order[k + 1] as usize])
            .collect();
        SortedColumn { order, run_end }
    }

    /// Merged scan: all per-slice CDF levels advance together; after every
    /// run of tied values the spread `max_l F_l - min_l F_l` over nonempty
    /// slices is the largest pairwise KS gap at that point.
    fn khat(&self, a: &SliceAssignment, levels: &mut Vec<usize>) -> f64 {
        if a.is_degenerate() {
            return 0.0;
        }
        let labels = a.labels();
        let sizes = a.counts();
        levels.clear();
        levels.resize(sizes.len(), 0);
        let mut best = 0.0f64;
        for (k, &i) in self.order.iter().enumerate() {
            levels[usize::from(labels[i as usize])] += 1;
            if !self.run_end[k] {
                continue;
            }
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for (&c, &m) in levels.iter().zip(sizes) {
                if m == 0 {
                    continue;
                }
                let f = c as f64 / m as f64;
                hi = hi.max(f);
                lo = lo.min(f);
            }
            best = best.max(hi - lo);
        }
        best
    }
}

fn check_covariate(x: &[f64], a_len: usize, column: usize) -> Result<()> {
    if x.len() != a_len {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: a_len,
        });
    }
    if let Some(row) = x.iter().position(|v| v.is_nan()) {
        return Err(Error::NonFinite { column, row });
    }
    Ok(())
}

/// Single-scheme statistic: the largest two-sample KS distance between any
/// pair of nonempty slices. Degenerate assignments give 0.
pub fn khat_single(x: &[f64], a: &SliceAssignment) -> Result<f64> {
    check_covariate(x, a.len(), 0)?;
    Ok(SortedColumn::new(x).khat(a, &mut Vec::new()))
}

/// Reference implementation of [`khat_single`]: every slice pair, every
/// sample point of the pair, CDFs by direct counting. `O(n^2 G^2)`.
pub fn khat_single_bruteforce(x: &[f64], a: &SliceAssignment) -> Result<f64> {
    check_covariate(x, a.len(), 0)?;
    let labels = a.labels();
    let sizes = a.counts();
    let cdf = |l: usize, t: f64| {
        let c = x
            .iter()
            .zip(labels)
            .filter(|&(&v, &h)| usize::from(h) == l && v <= t)
            .count();
        c as f64 / sizes[l] as f64
    };
    let mut best = 0.0f64;
    for l in 0..a.slices() {
        for m in l + 1..a.slices() {
            if sizes[l] == 0 || sizes[m] == 0 {
                continue;
            }
            for (&t, &h) in x.iter().zip(labels) {
                let h = usize::from(h);
                if h != l && h != m {
                    continue;
                }
                best = best.max((cdf(l, t) - cdf(m, t)).abs());
            }
        }
    }
    Ok(best)
}

/// Per-scheme statistics of one column, in grid order.
fn scheme_statistics(x: &[f64], grid: &SliceGrid) -> Vec<f64> {
    let sorted = SortedColumn::new(x);
    let mut levels = Vec::new();
    grid.assignments()
        .iter()
        .map(|a| sorted.khat(a, &mut levels))
        .collect()
}

fn fuse(per_scheme: &[f64]) -> f64 {
    per_scheme.iter().sum()
}

/// Fused statistic: the sum of single-scheme statistics over the grid.
pub fn khat_fused(x: &[f64], grid: &SliceGrid, record_per_scheme: bool) -> Result<VariableScore> {
    check_covariate(x, grid.observations(), 0)?;
    let per = scheme_statistics(x, grid);
    Ok(VariableScore {
        index: 0,
        fused: fuse(&per),
        per_scheme: record_per_scheme.then_some(per),
    })
}

fn grid_warnings(grid: &SliceGrid) -> Vec<String> {
    let mut out = Vec::new();
    for a in grid.assignments() {
        let empty = a.empty_slices();
        if a.is_degenerate() {
            out.push(format!(
                "scheme with G={} has fewer than 2 nonempty slices and contributes 0",
                a.slices()
            ));
        } else if !empty.is_empty() {
            let list: Vec<String> = empty.iter().map(|l| (l + 1).to_string()).collect();
            out.push(format!(
                "scheme with G={} has empty slices {{{}}}; they are skipped",
                a.slices(),
                list.join(",")
            ));
        }
    }
    out
}

/// Per-variable scores over a prebuilt grid, computed in parallel over
/// columns and stored by column index.
pub fn score_columns(x: &Matrix, grid: &SliceGrid, record_per_scheme: bool) -> Result<Vec<VariableScore>> {
    if x.nrows() != grid.observations() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: grid.observations(),
        });
    }
    (0..x.ncols())
        .into_par_iter()
        .map(|j| {
            let col = x.column(j);
            check_covariate(col, grid.observations(), j)?;
            let per = scheme_statistics(col, grid);
            Ok(VariableScore {
                index: j,
                fused: fuse(&per),
                per_scheme: record_per_scheme.then_some(per),
            })
        })
        .collect()
}

/// Screens with an explicit grid.
pub fn screen_with_grid(
    x: &Matrix,
    grid: &SliceGrid,
    screen_size: usize,
    record_per_scheme: bool,
    method: impl Into<String>,
) -> Result<ScreeningResult> {
    if screen_size > x.ncols() {
        return Err(Error::ScreenSizeTooLarge {
            d_n: screen_size,
            p: x.ncols(),
        });
    }
    let scores = score_columns(x, grid, record_per_scheme)?;
    ScreeningResult::from_scores(method, scores, screen_size, grid_warnings(grid))
}

/// Fused Kolmogorov filter screening of every column of `x` against `resp`.
pub fn screen(x: &Matrix, resp: &Response, cfg: &FilterConfig) -> Result<ScreeningResult> {
    if x.nrows() != resp.len() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: resp.len(),
        });
    }
    let grid = build_grid(resp, cfg.slice_counts.as_deref())?;
    let d_n = cfg
        .screen_size
        .unwrap_or_else(|| default_screen_size(x.nrows()).min(x.ncols()));
    screen_with_grid(x, &grid, d_n, cfg.record_per_scheme, "fused")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slicing::{assign_categorical, assign_continuous};
    use crate::stats::{ks_two_sample, SortedSample};
    use proptest::prelude::*;

    fn labels(h: &[u16], g: usize) -> SliceAssignment {
        SliceAssignment::from_labels(h.iter().map(|v| v - 1).collect(), g).unwrap()
    }

    #[test]
    fn two_slice_example() {
        let a = labels(&[1, 1, 2, 2], 2);
        assert_eq!(khat_single(&[1.0, 2.0, 3.0, 4.0], &a).unwrap(), 1.0);
    }

    #[test]
    fn three_slice_example_matches_bruteforce() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let a = labels(&[1, 2, 3, 1, 2, 3], 3);
        // slices {1,4}, {2,5}, {3,6}: pair (1,3) reaches 1/2 at x = 2
        let v = khat_single(&x, &a).unwrap();
        assert_eq!(v, khat_single_bruteforce(&x, &a).unwrap());
        assert_eq!(v, 0.5);
    }

    #[test]
    fn binary_reduces_to_ks() {
        let x = [0.3, 1.2, -0.5, 2.2, 0.9, 0.1, 1.7];
        let h = [1u16, 2, 1, 2, 2, 1, 1];
        let a = labels(&h, 2);
        let pick = |c| {
            SortedSample::from_slice(
                &x.iter().zip(&h).filter(|(_, &l)| l == c).map(|(&v, _)| v).collect::<Vec<_>>(),
            )
            .unwrap()
        };
        let ks = ks_two_sample(&pick(1), &pick(2));
        assert_eq!(khat_single(&x, &a).unwrap(), ks);
        assert_eq!(khat_single_bruteforce(&x, &a).unwrap(), ks);
    }

    #[test]
    fn single_nonempty_slice_is_zero() {
        let a = assign_categorical(&[2, 2, 2], 3).unwrap();
        assert_eq!(khat_single(&[1.0, 2.0, 3.0], &a).unwrap(), 0.0);
        assert_eq!(khat_single_bruteforce(&[1.0, 2.0, 3.0], &a).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch() {
        let a = labels(&[1, 2], 2);
        assert!(matches!(
            khat_single(&[1.0, 2.0, 3.0], &a),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn fused_additivity() {
        let x = [0.4, 2.0, -1.0, 3.3, 0.0, 1.1, 2.5, -0.7];
        let y = [1.0, 5.0, 2.0, 8.0, 3.0, 4.0, 7.0, 6.0];
        let a = assign_continuous(&y, 3).unwrap();
        let single = khat_single(&x, &a).unwrap();
        let one = SliceGrid::single(a.clone());
        assert_eq!(khat_fused(&x, &one, false).unwrap().fused, single);
        let twice = SliceGrid::from_assignments(vec![a.clone(), a]).unwrap();
        let s = khat_fused(&x, &twice, true).unwrap();
        assert_eq!(s.fused, 2.0 * single);
        assert_eq!(s.per_scheme, Some(vec![single, single]));
    }

    fn scored(values: &[f64]) -> Vec<VariableScore> {
        values
            .iter()
            .enumerate()
            .map(|(index, &fused)| VariableScore {
                index,
                fused,
                per_scheme: None,
            })
            .collect()
    }

    #[test]
    fn ranking_examples() {
        let r = ScreeningResult::from_scores("t", scored(&[0.9, 0.1, 0.5]), 2, vec![]).unwrap();
        assert_eq!(r.ranking, vec![0, 2, 1]);
        assert_eq!(r.selected, vec![0, 2]);
        assert_eq!(r.rank_positions(), vec![1, 3, 2]);

        let r = ScreeningResult::from_scores("t", scored(&[0.5, 0.5]), 1, vec![]).unwrap();
        assert_eq!(r.selected, vec![0]);
    }

    #[test]
    fn screen_size_larger_than_p() {
        assert!(matches!(
            ScreeningResult::from_scores("t", scored(&[0.5, 0.5]), 3, vec![]),
            Err(Error::ScreenSizeTooLarge { d_n: 3, p: 2 })
        ));
    }

    #[test]
    fn screen_reports_nan_column() {
        let x = Matrix::from_columns(&[vec![1.0; 10], {
            let mut c = vec![0.0; 10];
            c[4] = f64::NAN;
            c
        }])
        .unwrap();
        let y = Response::Continuous((0..10).map(f64::from).collect());
        let err = screen(&x, &y, &FilterConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { column: 1, row: 4 }));
    }

    #[test]
    fn count_scheme_with_empty_slices_warns() {
        let x = Matrix::from_columns(&[(0..10).map(f64::from).collect()]).unwrap();
        let y = Response::Count(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        let r = screen(
            &x,
            &y,
            &FilterConfig {
                slice_counts: Some(vec![3]),
                screen_size: Some(1),
                record_per_scheme: false,
            },
        )
        .unwrap();
        assert_eq!(r.scores[0].fused, 1.0);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn default_screen_size_values() {
        assert_eq!(default_screen_size(200), 38);
        assert_eq!(default_screen_size(100), 22);
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<u16>, usize)> {
        (2usize..=4).prop_flat_map(|g| {
            (1usize..=50).prop_flat_map(move |n| {
                (
                    prop::collection::vec((-6i32..6).prop_map(|v| v as f64 * 0.25), n),
                    prop::collection::vec(0..g as u16, n),
                    Just(g),
                )
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn merged_scan_equals_bruteforce((x, h, g) in instance()) {
            let a = SliceAssignment::from_labels(h, g).unwrap();
            let fast = khat_single(&x, &a).unwrap();
            prop_assert_eq!(fast, khat_single_bruteforce(&x, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&fast));
        }

        #[test]
        fn covariate_transform_invariance((x, h, g) in instance()) {
            let a = SliceAssignment::from_labels(h, g).unwrap();
            let grid = SliceGrid::from_assignments(vec![a.clone(), a]).unwrap();
            let tx: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
            prop_assert_eq!(
                khat_fused(&x, &grid, true).unwrap(),
                khat_fused(&tx, &grid, true).unwrap()
            );
        }

        #[test]
        fn row_permutation_invariance(
            x in prop::collection::vec(-5.0f64..5.0, 12..60),
            rot in 1usize..11,
        ) {
            let y: Vec<f64> = x.iter().map(|v| v.sin() + 0.1 * v).collect();
            let n = x.len();
            let perm: Vec<usize> = (0..n).map(|i| (i * 7 + rot) % n).collect();
            prop_assume!({ let mut s = perm.clone(); s.sort(); s.dedup(); s.len() == n });
            let px: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
            let py: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
            let g1 = build_grid(&Response::Continuous(y), Some(&[2, 3, 4])).unwrap();
            let g2 = build_grid(&Response::Continuous(py), Some(&[2, 3, 4])).unwrap();
            // Ties in y are absent, so slices hold the same observations.
            prop_assert_eq!(
                khat_fused(&x, &g1, true).unwrap().fused,
                khat_fused(&px, &g2, true).unwrap().fused
            );
        }
    }
}
