//! Block cross-validation on a time series: train on one stretch of the
//! trajectory, score the learned weights on the others.
//!
//! The features follow independent AR(1) processes, so neighboring frames
//! are correlated; keeping every 5th frame thins that out.
//!
//! cargo run --release --example block_cross_validation

use dii::math::DataMatrix;
use dii::optimizer::{LearningRate, OptimizerConfig};
use dii::sparsify::{block_cross_validate, BlockSplit};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> dii::Result<()> {
    let (n, d, phi) = (2000, 4, 0.8);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut x = vec![0.0f64; n * d];
    for t in 0..n {
        for a in 0..d {
            let prev = if t == 0 { 0.0 } else { x[(t - 1) * d + a] };
            let noise: f64 = StandardNormal.sample(&mut rng);
            x[t * d + a] = phi * prev + noise;
        }
    }
    let data = DataMatrix::new(x, n, d)?;
    // the target only sees the first two coordinates, the second one doubled
    let gt_rows: Vec<Vec<f64>> = (0..n).map(|t| vec![data.get(t, 0), 2.0 * data.get(t, 1)]).collect();
    let gt = DataMatrix::from_rows(&gt_rows)?;

    let split = BlockSplit::new(n, 4, 5)?;
    let cfg = OptimizerConfig {
        n_epochs: 40,
        eta0: LearningRate::Fixed(5.0),
        ..Default::default()
    };
    let cv = block_cross_validate(&data, &gt, &split, &cfg)?;
    for f in &cv.folds {
        let w: Vec<String> = f.weights.as_slice().iter().map(|v| format!("{v:.3}")).collect();
        println!("train on block {}: DII {:.4}, weights [{}]", f.train_block, f.train_dii, w.join(", "));
        for (b, dii) in &f.validation {
            println!("    block {b}: {dii:.4}");
        }
    }
    println!(
        "train {:.4} +- {:.4}   validation {:.4} +- {:.4}",
        cv.train_mean, cv.train_std, cv.validation_mean, cv.validation_std
    );
    Ok(())
}
