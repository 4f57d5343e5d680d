use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::MatchDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMode {
    Analytic,
    MonteCarlo { trials: usize, seed: u64 },
}

/// Expected reciprocal rank of one positive placed uniformly among `n`:
/// `H(n) / n`.
pub fn harmonic_over_n(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum::<f64>() / n as f64
}

/// MRR of uniformly random ranking.
///
/// Monte Carlo mode draws the positive's position in a uniformly shuffled
/// candidate list, which is uniform on `1..=n`.
pub fn random_baseline_mrr(ds: &MatchDataset, mode: BaselineMode) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Data("random baseline of an empty dataset".into()));
    }
    match mode {
        BaselineMode::Analytic => {
            Ok(ds.queries.iter().map(|q| harmonic_over_n(q.candidate_count())).sum::<f64>() / ds.len() as f64)
        }
        BaselineMode::MonteCarlo { trials, seed } => {
            if trials < 1 {
                return Err(Error::Config("Monte Carlo baseline needs at least one trial".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut total = 0.0;
            for _ in 0..trials {
                let mut sum = 0.0;
                for q in &ds.queries {
                    sum += 1.0 / rng.random_range(1..=q.candidate_count()) as f64;
                }
                total += sum / ds.len() as f64;
            }
            Ok(total / trials as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MatchQuery;

    fn ds(sizes: &[usize]) -> MatchDataset {
        MatchDataset::new(
            "t",
            sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| MatchQuery {
                    query: format!("q{i}"),
                    name: "n".into(),
                    candidates: (0..n).map(|j| format!("c{i}_{j}")).collect(),
                    positive: 0,
                })
                .collect(),
        )
    }

    #[test]
    fn single_query_values() {
        assert_eq!(random_baseline_mrr(&ds(&[2]), BaselineMode::Analytic).unwrap(), 0.75);
        let v = random_baseline_mrr(&ds(&[4]), BaselineMode::Analytic).unwrap();
        assert!((v - 25.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_over_n_is_decreasing() {
        for n in 1..200 {
            assert!(harmonic_over_n(n + 1) < harmonic_over_n(n));
        }
    }

    #[test]
    fn trials_must_be_positive() {
        assert!(random_baseline_mrr(&ds(&[2]), BaselineMode::MonteCarlo { trials: 0, seed: 0 }).is_err());
        assert!(random_baseline_mrr(&MatchDataset::default(), BaselineMode::Analytic).is_err());
    }
}
