use rayon::prelude::*;

use super::path::{PathEntry, PathKind, SparsityPath};
use crate::error::{DiiError, Result};
use crate::math::{DataMatrix, RankMatrix};
use crate::optimizer::{
    optimize_dii, resolve_eta0, start_weights, LearningRate, OptimizerConfig,
};

/// Largest feature count [`exhaustive_search`] accepts by default.
pub const EXHAUSTIVE_MAX_FEATURES: usize = 10;

/// 24 L1 strengths, log-spaced from 1e-6 to 1e-1.
pub fn default_p_grid() -> Vec<f64> {
    let n = 24;
    (0..n)
        .map(|k| 10f64.powf(-6.0 + 5.0 * k as f64 / (n - 1) as f64))
        .collect()
}

/// One optimization per L1 strength, keeping best-epoch weights.
///
/// An automatic learning rate is probed once without penalty and shared by
/// the whole grid, so entries differ only in `p`. Runs that shrink every
/// weight to zero are kept as flagged entries. Runs may execute in parallel;
/// the path follows the grid order.
pub fn lasso_search(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    cfg: &OptimizerConfig,
    p_grid: &[f64],
) -> Result<SparsityPath> {
    if p_grid.is_empty() {
        return Err(DiiError::InvalidArgument("empty L1 grid".into()));
    }
    let eta0 = resolve_eta0(data_a, ranks_b, &unpenalized_quiet(cfg))?;
    log::info!("lasso grid learning rate: {eta0}");
    let entries = p_grid
        .par_iter()
        .map(|&p| {
            let cfg = OptimizerConfig {
                l1_penalty: p,
                eta0: LearningRate::Fixed(eta0),
                ..cfg.clone()
            };
            match optimize_dii(data_a, ranks_b, &cfg) {
                Ok(trace) => Ok(PathEntry::new(p, trace.best_weights().clone(), trace.best_dii())),
                Err(DiiError::OverRegularized { epoch }) => {
                    log::info!("p = {p}: over-regularized at epoch {epoch}");
                    Ok(PathEntry::over_regularized(p, data_a.n_features()))
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparsityPath::new(PathKind::Lasso, entries))
}

fn unpenalized_quiet(cfg: &OptimizerConfig) -> OptimizerConfig {
    OptimizerConfig {
        l1_penalty: 0.0,
        ..cfg.clone()
    }
}

/// Subset searches choose features by construction, so they run without L1.
fn unpenalized(cfg: &OptimizerConfig) -> OptimizerConfig {
    if cfg.l1_penalty != 0.0 {
        log::warn!("L1 penalty {} ignored by subset search", cfg.l1_penalty);
    }
    unpenalized_quiet(cfg)
}

/// Backward elimination: optimize, drop the active feature with the smallest
/// weight (lowest index on ties), restart from the surviving weights.
///
/// The path has one entry per feature count `D, D-1, ..., 1`.
pub fn greedy_backward(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    cfg: &OptimizerConfig,
) -> Result<SparsityPath> {
    let cfg = unpenalized(cfg);
    let d = data_a.n_features();
    let mut active = vec![true; d];
    let mut w = start_weights(data_a, &cfg)?;
    let mut entries = Vec::with_capacity(d);
    for size in (1..=d).rev() {
        let run_cfg = OptimizerConfig {
            initial_weights: Some(w.clone()),
            ..cfg.clone()
        };
        let trace = optimize_dii(data_a, ranks_b, &run_cfg)?;
        let best = trace.best_weights().clone();
        log::info!("greedy: {size} features, DII {}", trace.best_dii());
        entries.push(PathEntry::new(size as f64, best.clone(), trace.best_dii()));
        if size == 1 {
            break;
        }
        let drop = (0..d)
            .filter(|&a| active[a])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]).then(a.cmp(&b)))
            .expect("at least two active features");
        active[drop] = false;
        w = best.masked(&active);
    }
    Ok(SparsityPath::new(PathKind::Greedy, entries))
}

/// Optimizes every nonempty feature subset, in increasing bit-mask order
/// (feature `a` is bit `a`). Refuses more than `max_features` features.
pub fn exhaustive_search(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    cfg: &OptimizerConfig,
    max_features: usize,
) -> Result<SparsityPath> {
    let d = data_a.n_features();
    if d > max_features {
        return Err(DiiError::TooManyFeatures {
            n_features: d,
            bound: max_features,
        });
    }
    let cfg = unpenalized(cfg);
    let base = start_weights(data_a, &cfg)?;
    let entries = (1u64..(1u64 << d))
        .into_par_iter()
        .map(|mask| {
            let keep: Vec<bool> = (0..d).map(|a| mask >> a & 1 == 1).collect();
            let size = mask.count_ones() as f64;
            let w0 = base.masked(&keep);
            if w0.is_all_zero() {
                // only constant features in this subset
                return Ok(PathEntry::over_regularized(size, d));
            }
            let run_cfg = OptimizerConfig {
                initial_weights: Some(w0),
                ..cfg.clone()
            };
            let trace = optimize_dii(data_a, ranks_b, &run_cfg)?;
            Ok(PathEntry::new(size, trace.best_weights().clone(), trace.best_dii()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparsityPath::new(PathKind::Exhaustive, entries))
}
