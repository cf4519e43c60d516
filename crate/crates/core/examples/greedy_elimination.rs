//! Backward elimination on the Gaussian benchmark: one solution for every
//! number of features, each warm-started from the previous one.
//!
//! cargo run --release --example greedy_elimination

use dii::dataio::{gen_gaussian_benchmark, GAUSSIAN_GT_WEIGHTS};
use dii::math::all_rows;
use dii::optimizer::{LearningRate, OptimizerConfig};
use dii::sparsify::greedy_backward;

fn main() -> dii::Result<()> {
    let bundle = gen_gaussian_benchmark(400, &GAUSSIAN_GT_WEIGHTS, 7)?;
    let ranks = bundle.ground_truth_ranks(&all_rows(400))?;
    let cfg = OptimizerConfig {
        n_epochs: 40,
        eta0: LearningRate::Fixed(10.0),
        ..Default::default()
    };
    let path = greedy_backward(&bundle.features, &ranks, &cfg)?;
    for e in &path.entries {
        let kept: Vec<&str> = e
            .weights
            .support()
            .into_iter()
            .map(|a| bundle.feature_names[a].as_str())
            .collect();
        println!("{:>2} features  DII {:.4}  {}", e.n_nonzero, e.dii.unwrap_or(f64::NAN), kept.join(","));
    }
    Ok(())
}
