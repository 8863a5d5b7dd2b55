use crate::error::{Error, Result};

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter(
            "at least 2 observations required".into(),
        ));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::NanInSample);
    }
    Ok(())
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateVariable);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn tied_pairs<I: Iterator<Item = usize>>(group_sizes: I) -> u64 {
    group_sizes.map(|t| (t * t.saturating_sub(1) / 2) as u64).sum()
}

/// Run lengths of consecutive equal items.
fn runs<T, F: Fn(&T, &T) -> bool>(items: &[T], eq: F) -> Vec<usize> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=items.len() {
        if k == items.len() || !eq(&items[k - 1], &items[k]) {
            out.push(k - start);
            start = k;
        }
    }
    out
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's tau-a: `(concordant - discordant) / (n(n-1)/2)`; tied pairs count
/// as neither.
///
/// Knight's merge-sort scheme, `O(n log n)`.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len();
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let ties_x = tied_pairs(runs(&pairs, |a, b| a.0 == b.0).into_iter());
    let ties_xy = tied_pairs(runs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1).into_iter());

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut ys, &mut buf);
    let ties_y = tied_pairs(runs(&ys, |a, b| a == b).into_iter());

    let total = (n * (n - 1) / 2) as u64;
    let diff = total as i64 - ties_x as i64 - ties_y as i64 + ties_xy as i64 - 2 * discordant as i64;
    Ok(diff as f64 / total as f64)
}

/// `O(n^2)` pair enumeration; test oracle for [`kendall_tau`].
#[cfg(test)]
pub(crate) fn kendall_tau_pairwise(x: &[f64], y: &[f64]) -> f64 {
    use std::cmp::Ordering;

    let n = x.len();
    let mut s: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]).unwrap();
            let dy = y[i].partial_cmp(&y[j]).unwrap();
            match (dx, dy) {
                (Ordering::Equal, _) | (_, Ordering::Equal) => {}
                (a, b) if a == b => s += 1,
                _ => s -= 1,
            }
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pearson_degenerate() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateVariable)
        ));
    }

    #[test]
    fn kendall_examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(), 1.0 / 3.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn kendall_length_mismatch() {
        assert!(matches!(
            kendall_tau(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn kendall_all_ties_is_zero() {
        assert_eq!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn kendall_merge_equals_enumeration(
            xy in prop::collection::vec((-4i32..4, -4i32..4), 2..80)
        ) {
            let x: Vec<f64> = xy.iter().map(|p| f64::from(p.0)).collect();
            let y: Vec<f64> = xy.iter().map(|p| f64::from(p.1)).collect();
            prop_assert_eq!(kendall_tau(&x, &y).unwrap(), kendall_tau_pairwise(&x, &y));
        }

        #[test]
        fn kendall_merge_equals_enumeration_continuous(
            xy in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..80)
        ) {
            let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
            let y: Vec<f64> = xy.iter().map(|p| p.1).collect();
            prop_assert_eq!(kendall_tau(&x, &y).unwrap(), kendall_tau_pairwise(&x, &y));
        }
    }
}
