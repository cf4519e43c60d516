//! Screen L1 strengths on the 285-monomial benchmark and report the best
//! solution per number of selected features.
//!
//! Uses 500 anchor rows to keep the run short; pass `all` as the first
//! argument to use every row.
//!
//! cargo run --release --example monomial_lasso [all]

use dii::dataio::{cosine_similarity, default_monomial_ground_truth, gen_monomial_benchmark};
use dii::optimizer::{LearningRate, OptimizerConfig, Schedule};
use dii::sparsify::{lasso_search, subsample_rows, RowMode};

fn main() -> dii::Result<()> {
    let n = 1500;
    let bundle = gen_monomial_benchmark(n, 10, 3, &default_monomial_ground_truth(), 42)?;
    let rows = match std::env::args().nth(1).as_deref() {
        Some("all") => RowMode::All,
        _ => RowMode::Fixed(500),
    };
    let ranks = bundle.ground_truth_ranks(&subsample_rows(n, rows, 42)?)?;
    let cfg = OptimizerConfig {
        n_epochs: 200,
        eta0: LearningRate::Fixed(100.0),
        schedule: Schedule::Cosine,
        ..Default::default()
    };
    let grid = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2];
    let path = lasso_search(&bundle.features, &ranks, &cfg, &grid)?;
    let gt = bundle.gt_weights.as_ref().expect("synthetic benchmark");

    println!("{:>9} {:>5} {:>8} {:>7}", "p", "nnz", "DII", "cosine");
    for e in &path.entries {
        match e.dii {
            Some(dii) => println!(
                "{:>9.1e} {:>5} {:>8.4} {:>7.3}",
                e.control,
                e.n_nonzero,
                dii,
                cosine_similarity(e.weights.as_slice(), gt.as_slice())?
            ),
            None => println!("{:>9.1e}  all weights shrunk to zero", e.control),
        }
    }
    println!();
    for (k, e) in path.best_per_cardinality() {
        if k <= 10 {
            let names: Vec<&str> = e
                .weights
                .support()
                .into_iter()
                .map(|a| bundle.feature_names[a].as_str())
                .collect();
            println!("{k:>2} features: {}", names.join(" "));
        }
    }
    Ok(())
}
