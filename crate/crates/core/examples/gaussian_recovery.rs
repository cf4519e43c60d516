//! Learn feature weights for ten Gaussian variables whose ground truth is a
//! rescaled copy of the same variables.
//!
//! cargo run --release --example gaussian_recovery

use dii::dataio::{cosine_similarity, gen_gaussian_benchmark, rescale_to_max, GAUSSIAN_GT_WEIGHTS};
use dii::math::all_rows;
use dii::optimizer::{optimize_dii, LearningRate, OptimizerConfig, Schedule};

fn main() -> dii::Result<()> {
    let bundle = gen_gaussian_benchmark(1500, &GAUSSIAN_GT_WEIGHTS, 42)?;
    let ranks = bundle.ground_truth_ranks(&all_rows(1500))?;
    let cfg = OptimizerConfig {
        n_epochs: 100,
        eta0: LearningRate::Fixed(10.0),
        schedule: Schedule::Cosine,
        ..Default::default()
    };
    let trace = optimize_dii(&bundle.features, &ranks, &cfg)?;

    for r in trace.records.iter().step_by(20) {
        println!("epoch {:3}  DII {:.5}  lambda {:.4}", r.epoch, r.dii, r.lambda);
    }
    let best = trace.best_weights();
    let shown = rescale_to_max(best.as_slice(), 5.0);
    println!("\nbest epoch {} with DII {:.5}", trace.best_epoch, trace.best_dii());
    println!("{:>8} {:>9} {:>9}", "feature", "target", "learned");
    for (a, name) in bundle.feature_names.iter().enumerate() {
        println!("{name:>8} {:>9.4} {:>9.4}", GAUSSIAN_GT_WEIGHTS[a], shown[a]);
    }
    let cos = cosine_similarity(best.as_slice(), &GAUSSIAN_GT_WEIGHTS)?;
    println!("cosine similarity to the target: {cos:.4}");
    Ok(())
}
