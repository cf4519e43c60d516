//! Cosine and exponential learning-rate decay, and what each does to an
//! L1-penalized run.
//!
//! cargo run --release --example learning_rate_schedules

use dii::dataio::{gen_gaussian_benchmark, GAUSSIAN_GT_WEIGHTS};
use dii::math::all_rows;
use dii::optimizer::{learning_rate, optimize_dii, LearningRate, OptimizerConfig, Schedule};

fn main() -> dii::Result<()> {
    let n_epochs = 60;
    println!("{:>5} {:>8} {:>8}", "epoch", "cosine", "exp");
    for k in (0..n_epochs).step_by(10) {
        println!(
            "{k:>5} {:>8.3} {:>8.3}",
            learning_rate(k, 1.0, n_epochs, Schedule::Cosine),
            learning_rate(k, 1.0, n_epochs, Schedule::Exponential)
        );
    }

    let bundle = gen_gaussian_benchmark(500, &GAUSSIAN_GT_WEIGHTS, 2)?;
    let ranks = bundle.ground_truth_ranks(&all_rows(500))?;
    for schedule in [Schedule::Cosine, Schedule::Exponential, Schedule::Best] {
        let cfg = OptimizerConfig {
            n_epochs,
            eta0: LearningRate::Fixed(10.0),
            schedule,
            l1_penalty: 1e-3,
            ..Default::default()
        };
        let trace = optimize_dii(&bundle.features, &ranks, &cfg)?;
        println!(
            "{schedule:?}: {} nonzero weights, DII {:.4} (kept {:?})",
            trace.best_weights().n_nonzero(),
            trace.best_dii(),
            trace.schedule
        );
    }
    Ok(())
}
