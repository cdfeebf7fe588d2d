//! Rating-prediction, decision-support, and ranking metrics, plus the
//! box-plot aggregation used to summarize per-user distributions.
//!
//! All functions return `None` on inputs for which the metric is undefined
//! (empty lists, zero ideal gain) rather than guessing a value.

use std::collections::HashSet;

/// Five-number summary of a per-user metric distribution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoxplotSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub n: usize,
}

/// An item of a recommendation list with its ground-truth rating and the
/// score the recommender predicted for it. Ranks are 1-based list positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatedItem {
    pub item: u32,
    pub true_rating: f64,
    pub predicted: f64,
}

/// Root mean square error over `(predicted, actual)` pairs.
pub fn rmse(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let sse: f64 = pairs.iter().map(|(p, a)| (p - a) * (p - a)).sum();
    Some((sse / pairs.len() as f64).sqrt())
}

/// Fraction of recommended items that are relevant.
pub fn precision(recommended: &[u32], relevant: &HashSet<u32>) -> Option<f64> {
    if recommended.is_empty() {
        return None;
    }
    let hits = recommended.iter().filter(|i| relevant.contains(i)).count();
    Some(hits as f64 / recommended.len() as f64)
}

/// Discounted cumulative gain of gains in list order: sum of
/// `gain / log2(rank + 1)` with 1-based ranks.
pub fn dcg(gains: &[f64]) -> Option<f64> {
    if gains.is_empty() {
        return None;
    }
    Some(
        gains
            .iter()
            .enumerate()
            .map(|(idx, g)| g / ((idx + 2) as f64).log2())
            .sum(),
    )
}

/// Normalized DCG of a list, using the true ratings as gains and the same
/// items re-sorted by true rating (descending) as the ideal ordering.
///
/// `None` when the list is empty or the ideal DCG is not strictly positive
/// (all-zero or negative-gain lists have no meaningful normalization).
pub fn ndcg(list: &[RatedItem]) -> Option<f64> {
    if list.is_empty() {
        return None;
    }
    let gains: Vec<f64> = list.iter().map(|e| e.true_rating).collect();
    let mut ideal = gains.clone();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let actual = dcg(&gains)?;
    let best = dcg(&ideal)?;
    if best <= 0.0 {
        return None;
    }
    Some(actual / best)
}

/// Five-number summary with quantiles by linear interpolation between order
/// statistics (the common "type 7" convention).
pub fn boxplot(values: &[f64]) -> Option<BoxplotSummary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Some(BoxplotSummary {
        min: sorted[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: sorted[sorted.len() - 1],
        n: sorted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn items(rated: &[(f64, f64)]) -> Vec<RatedItem> {
        rated
            .iter()
            .enumerate()
            .map(|(i, &(true_rating, predicted))| RatedItem {
                item: i as u32,
                true_rating,
                predicted,
            })
            .collect()
    }

    #[test]
    fn rmse_basics() {
        assert_eq!(rmse(&[(3.0, 3.0), (1.0, 1.0)]), Some(0.0));
        // {(3,1),(5,5)} -> sqrt((4+0)/2) = sqrt(2)
        assert_abs_diff_eq!(
            rmse(&[(3.0, 1.0), (5.0, 5.0)]).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        // single pair (a, a+c) -> |c|
        assert_abs_diff_eq!(rmse(&[(2.0, 2.0 + -3.5)]).unwrap(), 3.5, epsilon = 1e-12);
        assert_eq!(rmse(&[]), None);
    }

    #[test]
    fn precision_basics() {
        let relevant: HashSet<u32> = [1, 2, 3, 4].into_iter().collect();
        assert_eq!(precision(&[1, 2], &relevant), Some(1.0));
        assert_eq!(precision(&[5, 6], &relevant), Some(0.0));
        // 10 recommended, 4 relevant among them -> 0.4
        let ten: Vec<u32> = (1..=10).collect();
        assert_abs_diff_eq!(precision(&ten, &relevant).unwrap(), 0.4, epsilon = 1e-12);
        assert_eq!(precision(&[], &relevant), None);
    }

    #[test]
    fn dcg_hand_values() {
        // single item rated 4 -> 4.0 since disc(rank 1) = 1/log2(2) = 1
        assert_abs_diff_eq!(dcg(&[4.0]).unwrap(), 4.0, epsilon = 1e-12);
        // [5,3,4] -> 5 + 3/log2(3) + 4/2
        let expected = 5.0 + 3.0 / 3f64.log2() + 4.0 / 2.0;
        assert_abs_diff_eq!(dcg(&[5.0, 3.0, 4.0]).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 8.892789260714373, epsilon = 1e-12);
        assert_eq!(dcg(&[0.0, 0.0, 0.0]), Some(0.0));
        assert_eq!(dcg(&[]), None);
    }

    #[test]
    fn ndcg_hand_values() {
        // already ideal -> 1.0
        assert_abs_diff_eq!(
            ndcg(&items(&[(5.0, 0.9), (4.0, 0.8), (3.0, 0.7)])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // [5,3,4] vs ideal [5,4,3]
        let val = ndcg(&items(&[(5.0, 0.9), (3.0, 0.8), (4.0, 0.7)])).unwrap();
        let expected = 8.892789260714373 / (5.0 + 4.0 / 3f64.log2() + 3.0 / 2.0);
        assert_abs_diff_eq!(val, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(val, 0.9854904886373149, epsilon = 1e-10);
        // single-item list -> 1.0
        assert_abs_diff_eq!(ndcg(&items(&[(2.0, 0.1)])).unwrap(), 1.0, epsilon = 1e-12);
        // all-zero gains -> undefined
        assert_eq!(ndcg(&items(&[(0.0, 0.5), (0.0, 0.4)])), None);
        assert_eq!(ndcg(&[]), None);
    }

    #[test]
    fn boxplot_hand_values() {
        let one = boxplot(&[7.0]).unwrap();
        assert_eq!(
            (one.min, one.q1, one.median, one.q3, one.max, one.n),
            (7.0, 7.0, 7.0, 7.0, 7.0, 1)
        );
        let five = boxplot(&[5.0, 3.0, 1.0, 4.0, 2.0]).unwrap();
        assert_eq!(
            (five.min, five.q1, five.median, five.q3, five.max),
            (1.0, 2.0, 3.0, 4.0, 5.0)
        );
        let constant = boxplot(&[2.5, 2.5, 2.5]).unwrap();
        assert_eq!(constant.min, constant.max);
        assert_eq!(boxplot(&[]), None);
    }

    #[test]
    fn boxplot_interpolates() {
        // n=4: q1 at h = 0.75 -> 1 + 0.75*(2-1)
        let b = boxplot(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(b.q1, 1.75, epsilon = 1e-12);
        assert_abs_diff_eq!(b.median, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.q3, 3.25, epsilon = 1e-12);
    }

    proptest! {
        // flipping every error's sign leaves rmse unchanged
        #[test]
        fn rmse_sign_symmetric(errs in proptest::collection::vec(-10.0f64..10.0, 1..20)) {
            let base: Vec<(f64, f64)> = errs.iter().map(|e| (5.0 + e, 5.0)).collect();
            let flipped: Vec<(f64, f64)> = errs.iter().map(|e| (5.0 - e, 5.0)).collect();
            prop_assert!((rmse(&base).unwrap() - rmse(&flipped).unwrap()).abs() < 1e-12);
        }

        // swapping a higher-rated item to a later rank never increases dcg
        #[test]
        fn dcg_order_sensitive(
            mut gains in proptest::collection::vec(0.1f64..10.0, 2..12),
            a in 0usize..12, b in 0usize..12,
        ) {
            let a = a % gains.len();
            let b = b % gains.len();
            let (lo, hi) = (a.min(b), a.max(b));
            let before = dcg(&gains).unwrap();
            if gains[lo] > gains[hi] {
                gains.swap(lo, hi);
                prop_assert!(dcg(&gains).unwrap() <= before + 1e-12);
            }
        }

        // ndcg invariant under permutation of ties in the ideal ordering:
        // permuting equal-gain items of the LIST changes dcg(list) but the
        // ideal dcg is computed from sorted gains, so it never changes.
        #[test]
        fn ndcg_within_bounds_for_positive_gains(
            gains in proptest::collection::vec(0.1f64..10.0, 1..12),
        ) {
            let list = items(&gains.iter().map(|&g| (g, 0.0)).collect::<Vec<_>>());
            let v = ndcg(&list).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        }
    }
}
