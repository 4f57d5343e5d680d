use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MatchDataset;
use crate::error::{Error, Result};

pub const DEFAULT_RATIOS: [f64; 3] = [0.7, 0.1, 0.2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: MatchDataset,
    pub valid: MatchDataset,
    pub test: MatchDataset,
    pub ratios: [f64; 3],
    pub seed: u64,
}

/// `(train, valid, test)` sizes for `n` queries.
///
/// Train and test take `floor(ratio * n)` with the product evaluated in
/// `f64`; validation takes the remainder. The float product matters: it
/// matches the reference 70/10/20 counts, where 0.7 * 329320 floors to
/// 230523.
pub fn split_sizes(n: usize, ratios: [f64; 3]) -> Result<(usize, usize, usize)> {
    if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios {ratios:?} must be in [0,1] and sum to 1")));
    }
    let train = (ratios[0] * n as f64).floor() as usize;
    let test = ((ratios[2] * n as f64).floor() as usize).min(n - train);
    Ok((train, n - train - test, test))
}

/// Fisher–Yates shuffle with `seed`, then contiguous train/valid/test slices.
pub fn split_dataset(ds: &MatchDataset, ratios: [f64; 3], seed: u64) -> Result<DatasetSplit> {
    let (n_train, n_valid, _) = split_sizes(ds.len(), ratios)?;
    let mut queries = ds.queries.clone();
    queries.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = queries.split_off(n_train + n_valid);
    let valid = queries.split_off(n_train);
    Ok(DatasetSplit {
        train: ds.with_queries(queries),
        valid: ds.with_queries(valid),
        test: ds.with_queries(test),
        ratios,
        seed,
    })
}

/// `(combined, train, valid)` sizes when keeping `fraction` of `total`
/// train+valid queries, re-split in the `train:valid` ratio.
///
/// `combined = round(fraction * total)`, at least 2 when `total >= 2`;
/// `valid = floor(combined * r_valid / (r_train + r_valid))`, at least 1
/// when `combined >= 2`.
pub fn subsample_sizes(total: usize, fraction: f64, ratios: [f64; 3]) -> Result<(usize, usize, usize)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("training fraction {fraction} must be in (0, 1]")));
    }
    let mut combined = ((fraction * total as f64).round() as usize).min(total);
    if total >= 2 {
        combined = combined.max(2);
    }
    let share = ratios[1] / (ratios[0] + ratios[1]);
    let mut valid = (combined as f64 * share).floor() as usize;
    if combined >= 2 {
        valid = valid.clamp(1, combined - 1);
    }
    Ok((combined, combined - valid, valid))
}

/// Samples `fraction` of train ∪ valid without replacement and re-splits it
/// in the original train:valid ratio. The test set is left untouched.
pub fn subsample_training(split: &DatasetSplit, fraction: f64, seed: u64) -> Result<DatasetSplit> {
    let mut pool: Vec<_> = split.train.queries.iter().chain(&split.valid.queries).cloned().collect();
    let (combined, n_train, _) = subsample_sizes(pool.len(), fraction, split.ratios)?;
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    pool.truncate(combined);
    let valid = pool.split_off(n_train);
    Ok(DatasetSplit {
        train: split.train.with_queries(pool),
        valid: split.valid.with_queries(valid),
        test: split.test.clone(),
        ratios: split.ratios,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MatchQuery;

    fn ds(n: usize) -> MatchDataset {
        let queries = (0..n)
            .map(|i| MatchQuery {
                query: format!("q{i}"),
                name: format!("n{i}"),
                candidates: vec![format!("a{i}"), format!("b{i}")],
                positive: i % 2,
            })
            .collect();
        MatchDataset::new("S->T", queries)
    }

    #[test]
    fn ten_queries() {
        assert_eq!(split_sizes(10, DEFAULT_RATIOS).unwrap(), (7, 1, 2));
        let s = split_dataset(&ds(10), DEFAULT_RATIOS, 1).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (7, 1, 2));
    }

    #[test]
    fn float_products_floor_below_exact_integers() {
        assert_eq!(split_sizes(90, DEFAULT_RATIOS).unwrap(), (62, 10, 18));
    }

    #[test]
    fn reference_totals() {
        assert_eq!(split_sizes(376_065, DEFAULT_RATIOS).unwrap(), (263_245, 37_607, 75_213));
        assert_eq!(split_sizes(329_320, DEFAULT_RATIOS).unwrap(), (230_523, 32_933, 65_864));
    }

    #[test]
    fn bad_ratios_rejected() {
        assert!(split_sizes(10, [0.7, 0.1, 0.1]).is_err());
        assert!(split_dataset(&ds(10), [0.5, 0.6, -0.1], 0).is_err());
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let d = ds(101);
        let a = split_dataset(&d, DEFAULT_RATIOS, 9).unwrap();
        assert_eq!(a, split_dataset(&d, DEFAULT_RATIOS, 9).unwrap());
        assert_ne!(a.train.queries, split_dataset(&d, DEFAULT_RATIOS, 10).unwrap().train.queries);
        let mut all: Vec<_> = a.train.queries.iter().chain(&a.valid.queries).chain(&a.test.queries).map(|q| q.query.clone()).collect();
        all.sort();
        let mut orig: Vec<_> = d.queries.iter().map(|q| q.query.clone()).collect();
        orig.sort();
        assert_eq!(all, orig);
    }

    #[test]
    fn subsample_counts() {
        // 0.005 of a 300k-query train+valid pool.
        assert_eq!(subsample_sizes(263_245 + 37_607, 0.005, DEFAULT_RATIOS).unwrap(), (1504, 1316, 188));
        assert!(subsample_sizes(100, 0.0, DEFAULT_RATIOS).is_err());
        assert!(subsample_sizes(100, 1.5, DEFAULT_RATIOS).is_err());
        assert_eq!(subsample_sizes(40, 0.01, DEFAULT_RATIOS).unwrap(), (2, 1, 1));
    }

    #[test]
    fn full_fraction_keeps_membership() {
        let s = split_dataset(&ds(50), DEFAULT_RATIOS, 3).unwrap();
        let sub = subsample_training(&s, 1.0, 4).unwrap();
        let mut before: Vec<_> = s.train.queries.iter().chain(&s.valid.queries).map(|q| &q.query).collect();
        let mut after: Vec<_> = sub.train.queries.iter().chain(&sub.valid.queries).map(|q| &q.query).collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
        assert_eq!(sub.test, s.test);
    }
}
