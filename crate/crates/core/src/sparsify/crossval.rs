use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DiiError, Result};
use crate::math::{all_rows, DataMatrix, LambdaMode, RankMatrix, WeightVector};
use crate::optimizer::{evaluate_dii_fixed, optimize_dii, OptimizerConfig};

/// Fewest points a strided block may keep. The adaptive softmax scale needs
/// a second neighbor for every point.
const MIN_BLOCK_POINTS: usize = 3;

/// Consecutive blocks of point indices, each thinned to every `stride`-th
/// point. Block sizes differ by at most one; earlier blocks get the extra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSplit {
    pub n_blocks: usize,
    pub stride: usize,
    /// Block of every point index.
    pub assignments: Vec<usize>,
}

impl BlockSplit {
    pub fn new(n_points: usize, n_blocks: usize, stride: usize) -> Result<Self> {
        if n_blocks < 2 {
            return Err(DiiError::InvalidArgument(
                "cross-validation needs at least 2 blocks; the validation set would be empty"
                    .into(),
            ));
        }
        if stride < 1 {
            return Err(DiiError::InvalidArgument("stride must be at least 1".into()));
        }
        let (base, extra) = (n_points / n_blocks, n_points % n_blocks);
        let assignments: Vec<usize> = (0..n_blocks)
            .flat_map(|b| std::iter::repeat(b).take(base + usize::from(b < extra)))
            .collect();
        let split = Self {
            n_blocks,
            stride,
            assignments,
        };
        for b in 0..n_blocks {
            let kept = split.block(b).len();
            if kept < MIN_BLOCK_POINTS {
                return Err(DiiError::InvalidArgument(format!(
                    "block {b} keeps {kept} points after striding, need {MIN_BLOCK_POINTS}"
                )));
            }
        }
        Ok(split)
    }

    /// Retained point indices of block `b`.
    pub fn block(&self, b: usize) -> Vec<usize> {
        let start = self.assignments.partition_point(|&x| x < b);
        let end = self.assignments.partition_point(|&x| x <= b);
        (start..end).step_by(self.stride).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub train_block: usize,
    pub weights: WeightVector,
    pub train_dii: f64,
    /// `(block, DII)` for every other block, in block order.
    pub validation: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub folds: Vec<FoldResult>,
    pub train_mean: f64,
    pub train_std: f64,
    pub validation_mean: f64,
    pub validation_std: f64,
}

/// Population mean and standard deviation.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

struct Block {
    data: DataMatrix,
    ranks: RankMatrix,
}

/// Trains on each block in turn and scores the learned weights on every
/// other block. Validation uses the adaptive scale of its own distances.
pub fn block_cross_validate(
    data_a: &DataMatrix,
    data_b: &DataMatrix,
    split: &BlockSplit,
    cfg: &OptimizerConfig,
) -> Result<CrossValidation> {
    let n = data_a.n_points();
    if data_b.n_points() != n || split.assignments.len() != n {
        return Err(DiiError::ShapeMismatch(format!(
            "{n} input points, {} ground-truth points, split over {}",
            data_b.n_points(),
            split.assignments.len()
        )));
    }
    let blocks = (0..split.n_blocks)
        .map(|b| {
            let idx = split.block(b);
            let data = data_a.select_rows(&idx)?;
            let ranks = RankMatrix::from_ground_truth(&data_b.select_rows(&idx)?, &all_rows(idx.len()))?;
            Ok(Block { data, ranks })
        })
        .collect::<Result<Vec<_>>>()?;
    let folds = (0..split.n_blocks)
        .into_par_iter()
        .map(|t| {
            let trace = optimize_dii(&blocks[t].data, &blocks[t].ranks, cfg)?;
            let weights = trace.best_weights().clone();
            let validation = (0..split.n_blocks)
                .filter(|&v| v != t)
                .map(|v| {
                    let dii = evaluate_dii_fixed(&blocks[v].data, &blocks[v].ranks, &weights, LambdaMode::Adaptive)?;
                    Ok((v, dii))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FoldResult {
                train_block: t,
                train_dii: trace.best_dii(),
                weights,
                validation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let train: Vec<f64> = folds.iter().map(|f| f.train_dii).collect();
    let val: Vec<f64> = folds
        .iter()
        .flat_map(|f| f.validation.iter().map(|&(_, d)| d))
        .collect();
    let (train_mean, train_std) = mean_std(&train);
    let (validation_mean, validation_std) = mean_std(&val);
    Ok(CrossValidation {
        folds,
        train_mean,
        train_std,
        validation_mean,
        validation_std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_are_contiguous_and_cover() {
        let s = BlockSplit::new(10, 3, 1).unwrap();
        assert_eq!(s.assignments, [0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
        assert_eq!(s.block(0), [0, 1, 2, 3]);
        assert_eq!(s.block(2), [7, 8, 9]);
    }

    #[test]
    fn stride_thins_each_block() {
        let s = BlockSplit::new(40, 2, 7).unwrap();
        assert_eq!(s.block(0), [0, 7, 14]);
        assert_eq!(s.block(1), [20, 27, 34]);
    }

    #[test]
    fn invalid_splits() {
        assert!(BlockSplit::new(100, 1, 1).is_err());
        assert!(BlockSplit::new(100, 4, 0).is_err());
        assert!(BlockSplit::new(20, 4, 3).is_err());
    }
}
