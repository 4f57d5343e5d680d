//! MRR with fixed scores, random baselines and the breakdown tables.
//!
//! cargo run --example evaluate_ranking

use kgmatch::dataset::{MatchDataset, MatchQuery};
use kgmatch::eval::{evaluate, random_baseline_mrr, BaselineMode, EvalOptions, RandomScorer, ReportMeta};
use kgmatch::typemap::TypeMap;

fn query(id: &str, n: usize, positive: usize) -> MatchQuery {
    MatchQuery {
        query: format!("http://src/{id}"),
        name: id.to_string(),
        candidates: (0..n).map(|i| format!("http://tgt/{id}_{i}")).collect(),
        positive,
    }
}

fn main() -> kgmatch::Result<()> {
    let ds = MatchDataset::new("demo", vec![query("a", 2, 0), query("b", 3, 2), query("c", 5, 1), query("d", 9, 4), query("e", 12, 0)]);
    let mut types = TypeMap::new();
    for q in &ds.queries {
        types.insert(&q.query, if q.candidate_count() > 4 { "Album" } else { "Person" });
        for (i, c) in q.candidates.iter().enumerate() {
            types.insert(c, if i % 2 == 0 { "Album" } else { "Person" });
        }
    }

    // A scorer that prefers later candidates.
    let scorer = |q: &MatchQuery| (0..q.candidate_count()).map(|i| i as f64).collect::<Vec<f64>>();
    let opts = EvalOptions { types: Some(&types), bucket_edges: Some(vec![2, 4, 8, 16]) };
    let report = evaluate(&scorer, &ds, &opts, ReportMeta { model: "reverse-order".into(), ..Default::default() })?;
    println!("{}", report.to_json());

    println!("analytic random baseline {:.4}", random_baseline_mrr(&ds, BaselineMode::Analytic)?);
    println!("Monte Carlo baseline     {:.4}", random_baseline_mrr(&ds, BaselineMode::MonteCarlo { trials: 100_000, seed: 1 })?);
    let random = evaluate(&RandomScorer { seed: 3 }, &ds, &EvalOptions::default(), ReportMeta::default())?;
    println!("one random scorer        {:.4}", random.mrr);
    Ok(())
}
