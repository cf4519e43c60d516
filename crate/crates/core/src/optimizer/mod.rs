//! Gradient-descent minimization of the DII over the feature weights.
//!
//! Each epoch takes a plain gradient step, then applies the two-step L1
//! shrinkage ("GD clipping"). The softmax scale is recomputed from the
//! current distances every epoch unless fixed.

mod schedule;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use schedule::{learning_rate, Schedule};

use crate::error::{DiiError, Result};
use crate::math::{evaluate, DataMatrix, LambdaMode, RankMatrix, WeightVector};
use crate::rng::{stream_rng, Stream};

/// Initial learning rate: explicit, or picked by short probe runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearningRate {
    Auto,
    Fixed(f64),
}

/// Candidates tried when the learning rate is [`LearningRate::Auto`].
///
/// The DII is invariant to a global rescaling of the weights, so its gradient
/// shrinks like `1/|w|` and a useful rate grows with `|w|^2`. The grid spans
/// six decades to cover inputs from a handful to hundreds of features.
pub const AUTO_ETA_CANDIDATES: [f64; 10] = [1000.0, 300.0, 100.0, 30.0, 10.0, 3.0, 1.0, 0.1, 0.01, 0.001];
/// Epochs per probe run.
pub const AUTO_ETA_PROBE_EPOCHS: usize = 5;
/// Probe runs use at most this many anchor rows.
pub const AUTO_ETA_PROBE_ROWS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub n_epochs: usize,
    pub eta0: LearningRate,
    pub schedule: Schedule,
    /// L1 penalty strength `p`; zero disables shrinkage.
    pub l1_penalty: f64,
    pub lambda: LambdaMode,
    /// Inverse standard deviations when unset.
    pub initial_weights: Option<WeightVector>,
    /// Seed for the anchor-row subsampling done by callers.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_epochs: 100,
            eta0: LearningRate::Auto,
            schedule: Schedule::Cosine,
            l1_penalty: 0.0,
            lambda: LambdaMode::Adaptive,
            initial_weights: None,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_epochs < 1 {
            return Err(DiiError::InvalidArgument("n_epochs must be at least 1".into()));
        }
        if !(self.l1_penalty >= 0.0 && self.l1_penalty.is_finite()) {
            return Err(DiiError::InvalidArgument(format!(
                "L1 penalty must be nonnegative, got {}",
                self.l1_penalty
            )));
        }
        if let LearningRate::Fixed(eta) = self.eta0 {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(DiiError::InvalidArgument(format!(
                    "learning rate must be positive, got {eta}"
                )));
            }
        }
        if let LambdaMode::Fixed(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(DiiError::InvalidLambda(l));
            }
        }
        Ok(())
    }
}

/// Inverse population standard deviation per feature. Constant features get
/// weight zero and a warning.
pub fn initial_weights(data: &DataMatrix) -> WeightVector {
    let w = data
        .column_moments()
        .into_iter()
        .enumerate()
        .map(|(alpha, (_, std))| {
            if std > 0.0 {
                1.0 / std
            } else {
                log::warn!("feature {alpha} is constant; its weight starts at zero");
                0.0
            }
        })
        .collect();
    WeightVector::new(w).expect("inverse std is finite and positive")
}

/// Two-step L1 update applied after a gradient step.
///
/// Positive components shrink by `η p` and stop at zero; negative components
/// become `|min(0, w + η p)|`; zeros stay zero. With `p = 0` this returns the
/// magnitudes.
pub fn l1_clip_step(w_half: &[f64], eta: f64, p: f64) -> WeightVector {
    let shrink = eta * p;
    let w = w_half
        .iter()
        .map(|&w| {
            if w > 0.0 {
                (w - shrink).max(0.0)
            } else if w < 0.0 {
                (w + shrink).min(0.0).abs()
            } else {
                0.0
            }
        })
        .collect();
    WeightVector::new(w).expect("clipped weights are nonnegative")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub dii: f64,
    pub weights: WeightVector,
    /// Rate of the step that produced these weights; `None` at epoch 0.
    pub learning_rate: Option<f64>,
    /// Softmax scale the DII was evaluated with.
    pub lambda: f64,
}

/// Every epoch of one run, including the starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub schedule: Schedule,
    pub eta0: f64,
}

impl OptimizationTrace {
    fn new(records: Vec<EpochRecord>, schedule: Schedule, eta0: f64) -> Self {
        let final_support = records.last().expect("nonempty trace").weights.support();
        // lowest DII among epochs sharing the final support, so shrinkage is
        // never undone by picking an earlier dense epoch
        let best_epoch = records
            .iter()
            .filter(|r| r.weights.support() == final_support)
            .min_by(|a, b| a.dii.total_cmp(&b.dii))
            .map(|r| r.epoch)
            .expect("final epoch qualifies");
        Self {
            records,
            best_epoch,
            schedule,
            eta0,
        }
    }

    pub fn final_record(&self) -> &EpochRecord {
        self.records.last().expect("nonempty trace")
    }

    pub fn best_record(&self) -> &EpochRecord {
        &self.records[self.best_epoch]
    }

    pub fn final_weights(&self) -> &WeightVector {
        &self.final_record().weights
    }

    pub fn best_weights(&self) -> &WeightVector {
        &self.best_record().weights
    }

    pub fn best_dii(&self) -> f64 {
        self.best_record().dii
    }

    pub fn min_dii(&self) -> f64 {
        self.records.iter().map(|r| r.dii).fold(f64::INFINITY, f64::min)
    }

    /// One JSON object per epoch.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Minimizes the DII of `data_a` against the ground-truth ranks.
///
/// The anchor rows are those of `ranks_b`. With [`Schedule::Best`] both
/// decays run and the trace with the lower best-epoch DII is returned.
pub fn optimize_dii(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    cfg: &OptimizerConfig,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    if ranks_b.n_cols() != data_a.n_points() {
        return Err(DiiError::ShapeMismatch(format!(
            "ground-truth ranks cover {} points, data has {}",
            ranks_b.n_cols(),
            data_a.n_points()
        )));
    }
    let w0 = start_weights(data_a, cfg)?;
    let eta0 = match cfg.eta0 {
        LearningRate::Fixed(eta) => eta,
        LearningRate::Auto => {
            let eta = pick_eta0(data_a, ranks_b, cfg, &w0)?;
            log::info!("probe picked learning rate {eta}");
            eta
        }
    };
    let schedules: &[Schedule] = match cfg.schedule {
        Schedule::Best => &[Schedule::Cosine, Schedule::Exponential],
        ref s => std::slice::from_ref(s),
    };
    let mut best: Option<OptimizationTrace> = None;
    for &schedule in schedules {
        let trace = run(data_a, ranks_b, cfg, &w0, schedule, eta0, cfg.n_epochs)?;
        if best.as_ref().map_or(true, |b| trace.best_dii() < b.best_dii()) {
            best = Some(trace);
        }
    }
    Ok(best.expect("at least one schedule"))
}

/// Configured initial weights, checked against `data_a`, or inverse
/// standard deviations.
pub(crate) fn start_weights(data_a: &DataMatrix, cfg: &OptimizerConfig) -> Result<WeightVector> {
    match &cfg.initial_weights {
        Some(w) if w.len() != data_a.n_features() => Err(DiiError::ShapeMismatch(format!(
            "{} initial weights for {} features",
            w.len(),
            data_a.n_features()
        ))),
        Some(w) => Ok(w.clone()),
        None => Ok(initial_weights(data_a)),
    }
}

/// The initial learning rate `cfg` would use: the fixed value, or the result
/// of the probe runs. With [`Schedule::Best`] one rate serves both decays.
pub fn resolve_eta0(data_a: &DataMatrix, ranks_b: &RankMatrix, cfg: &OptimizerConfig) -> Result<f64> {
    cfg.validate()?;
    match cfg.eta0 {
        LearningRate::Fixed(eta) => Ok(eta),
        LearningRate::Auto => pick_eta0(data_a, ranks_b, cfg, &start_weights(data_a, cfg)?),
    }
}

/// Short probe runs over [`AUTO_ETA_CANDIDATES`]; keeps the lowest DII.
/// A cosine probe stands in for [`Schedule::Best`].
fn pick_eta0(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    cfg: &OptimizerConfig,
    w0: &WeightVector,
) -> Result<f64> {
    let schedule = match cfg.schedule {
        Schedule::Best => Schedule::Cosine,
        s => s,
    };
    let probe = AUTO_ETA_PROBE_EPOCHS.min(cfg.n_epochs);
    let probe_ranks = probe_rows(ranks_b, cfg.seed);
    let probe_ranks = probe_ranks.as_ref().unwrap_or(ranks_b);
    let mut chosen: Option<(f64, f64)> = None;
    for &eta in &AUTO_ETA_CANDIDATES {
        let dii = match run_epochs(data_a, probe_ranks, cfg, w0, schedule, eta, cfg.n_epochs, probe) {
            Ok(records) => records.iter().map(|r| r.dii).fold(f64::INFINITY, f64::min),
            Err(e) if e.is_numerical() => continue,
            Err(e) => return Err(e),
        };
        if chosen.map_or(true, |(_, best)| dii < best) {
            chosen = Some((eta, dii));
        }
    }
    let (eta, _) = chosen.ok_or(DiiError::OverRegularized { epoch: 0 })?;
    log::debug!("auto learning rate: {eta}");
    Ok(eta)
}

/// Seeded subset of at most [`AUTO_ETA_PROBE_ROWS`] anchor rows, or `None`
/// when the ranks are already that small.
fn probe_rows(ranks_b: &RankMatrix, seed: u64) -> Option<RankMatrix> {
    if ranks_b.n_rows() <= AUTO_ETA_PROBE_ROWS {
        return None;
    }
    let mut rng = stream_rng(seed, Stream::Probe);
    let mut picks = rand::seq::index::sample(&mut rng, ranks_b.n_rows(), AUTO_ETA_PROBE_ROWS).into_vec();
    picks.sort_unstable();
    Some(ranks_b.select_rows(&picks))
}

fn run(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    cfg: &OptimizerConfig,
    w0: &WeightVector,
    schedule: Schedule,
    eta0: f64,
    n_epochs: usize,
) -> Result<OptimizationTrace> {
    let records = run_epochs(data_a, ranks_b, cfg, w0, schedule, eta0, n_epochs, n_epochs)?;
    Ok(OptimizationTrace::new(records, schedule, eta0))
}

/// First `stop` epochs of an `n_epochs` schedule.
#[allow(clippy::too_many_arguments)]
fn run_epochs(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    cfg: &OptimizerConfig,
    w0: &WeightVector,
    schedule: Schedule,
    eta0: f64,
    n_epochs: usize,
    stop: usize,
) -> Result<Vec<EpochRecord>> {
    let mut w = w0.clone();
    let mut eval = evaluate(data_a, &w, ranks_b, cfg.lambda)?;
    let mut records = Vec::with_capacity(stop + 1);
    records.push(EpochRecord {
        epoch: 0,
        dii: eval.dii,
        weights: w.clone(),
        learning_rate: None,
        lambda: eval.lambda,
    });
    for t in 0..stop {
        let eta = learning_rate(t, eta0, n_epochs, schedule);
        let grad = eval.gradient(data_a, &w, ranks_b)?;
        let w_half: Vec<f64> = w
            .as_slice()
            .iter()
            .zip(&grad)
            .map(|(wi, gi)| wi - eta * gi)
            .collect();
        if w_half.iter().any(|v| !v.is_finite()) {
            return Err(DiiError::InvalidArgument(format!(
                "non-finite weights at epoch {}",
                t + 1
            )));
        }
        w = l1_clip_step(&w_half, eta, cfg.l1_penalty);
        if w.is_all_zero() {
            return Err(DiiError::OverRegularized { epoch: t + 1 });
        }
        eval = evaluate(data_a, &w, ranks_b, cfg.lambda)?;
        records.push(EpochRecord {
            epoch: t + 1,
            dii: eval.dii,
            weights: w.clone(),
            learning_rate: Some(eta),
            lambda: eval.lambda,
        });
    }
    Ok(records)
}

/// One forward DII evaluation at fixed weights.
pub fn evaluate_dii_fixed(
    data_a: &DataMatrix,
    ranks_b: &RankMatrix,
    w: &WeightVector,
    lambda: LambdaMode,
) -> Result<f64> {
    Ok(evaluate(data_a, w, ranks_b, lambda)?.dii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::all_rows;

    #[test]
    fn inverse_std_weights() {
        let x = DataMatrix::from_rows(&[vec![0.0, 1.0, 3.0], vec![4.0, -1.0, 3.0]]).unwrap();
        assert_eq!(initial_weights(&x).as_slice(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn clip_cases() {
        assert_eq!(l1_clip_step(&[0.05], 1.0, 0.1).as_slice(), &[0.0]);
        let w = l1_clip_step(&[-0.3], 1.0, 0.1);
        assert!((w[0] - 0.2).abs() < 1e-15);
        assert_eq!(l1_clip_step(&[0.0, 1.5, -2.0], 0.3, 0.0).as_slice(), &[0.0, 1.5, 2.0]);
        assert_eq!(l1_clip_step(&[-0.05], 1.0, 0.1).as_slice(), &[0.0]);
    }

    #[test]
    fn config_validation() {
        let cfg = OptimizerConfig {
            n_epochs: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = OptimizerConfig {
            l1_penalty: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = OptimizerConfig {
            eta0: LearningRate::Fixed(0.0),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    fn toy() -> (DataMatrix, RankMatrix) {
        let x = DataMatrix::from_rows(&[
            vec![0.0, 0.3],
            vec![1.0, -0.2],
            vec![2.5, 0.9],
            vec![3.0, 0.1],
            vec![4.2, -0.7],
            vec![5.9, 0.4],
        ])
        .unwrap();
        let b = x.select_columns(&[0]).unwrap();
        let rb = RankMatrix::from_ground_truth(&b, &all_rows(6)).unwrap();
        (x, rb)
    }

    #[test]
    fn trace_has_epoch_zero_and_is_nonnegative() {
        let (x, rb) = toy();
        let cfg = OptimizerConfig {
            n_epochs: 12,
            eta0: LearningRate::Fixed(0.5),
            ..Default::default()
        };
        let trace = optimize_dii(&x, &rb, &cfg).unwrap();
        assert_eq!(trace.records.len(), 13);
        assert_eq!(trace.records[0].learning_rate, None);
        assert!(trace
            .records
            .iter()
            .all(|r| r.weights.as_slice().iter().all(|&v| v >= 0.0)));
        assert!(trace.min_dii() <= trace.records[0].dii);
    }

    #[test]
    fn strong_penalty_aborts() {
        let (x, rb) = toy();
        let cfg = OptimizerConfig {
            n_epochs: 5,
            eta0: LearningRate::Fixed(1.0),
            l1_penalty: 100.0,
            ..Default::default()
        };
        assert!(matches!(
            optimize_dii(&x, &rb, &cfg),
            Err(DiiError::OverRegularized { epoch: 1 })
        ));
    }

    #[test]
    fn zero_weight_stays_zero() {
        let (x, rb) = toy();
        let cfg = OptimizerConfig {
            n_epochs: 8,
            eta0: LearningRate::Fixed(0.5),
            initial_weights: Some(WeightVector::new(vec![1.0, 0.0]).unwrap()),
            ..Default::default()
        };
        let trace = optimize_dii(&x, &rb, &cfg).unwrap();
        assert!(trace.records.iter().all(|r| r.weights[1] == 0.0));
    }

    #[test]
    fn jsonl_has_one_line_per_epoch() {
        let (x, rb) = toy();
        let cfg = OptimizerConfig {
            n_epochs: 3,
            eta0: LearningRate::Fixed(0.1),
            ..Default::default()
        };
        let trace = optimize_dii(&x, &rb, &cfg).unwrap();
        let mut buf = Vec::new();
        trace.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        let first: EpochRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first.epoch, 0);
    }
}
