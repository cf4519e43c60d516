//! Optimize every subset of five features and print the best subset of
//! each size. Feasible only for a handful of features (2^D - 1 runs).
//!
//! cargo run --release --example exhaustive_subsets

use dii::dataio::gen_gaussian_benchmark;
use dii::math::all_rows;
use dii::optimizer::{LearningRate, OptimizerConfig};
use dii::sparsify::{exhaustive_search, EXHAUSTIVE_MAX_FEATURES};

fn main() -> dii::Result<()> {
    let bundle = gen_gaussian_benchmark(300, &[3.0, 1.5, 1.0, 0.2, 0.0], 11)?;
    let ranks = bundle.ground_truth_ranks(&all_rows(300))?;
    let cfg = OptimizerConfig {
        n_epochs: 30,
        eta0: LearningRate::Fixed(10.0),
        ..Default::default()
    };
    let path = exhaustive_search(&bundle.features, &ranks, &cfg, EXHAUSTIVE_MAX_FEATURES)?;
    println!("{} subsets optimized", path.entries.len());
    for (k, e) in path.best_per_cardinality() {
        let names: Vec<&str> = e
            .weights
            .support()
            .into_iter()
            .map(|a| bundle.feature_names[a].as_str())
            .collect();
        println!("size {k}: DII {:.4} with {}", e.dii.unwrap_or(f64::NAN), names.join(","));
    }
    Ok(())
}
