use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataio::write_csv;
use crate::error::Result;
use crate::math::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Control is the L1 strength.
    Lasso,
    /// Control is the number of features still in play.
    Greedy,
    /// Control is the subset size.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEntry {
    pub control: f64,
    pub weights: WeightVector,
    /// `None` when the run was over-regularized.
    pub dii: Option<f64>,
    pub n_nonzero: usize,
}

impl PathEntry {
    pub fn new(control: f64, weights: WeightVector, dii: f64) -> Self {
        Self {
            control,
            n_nonzero: weights.n_nonzero(),
            weights,
            dii: Some(dii),
        }
    }

    /// A run whose weights were all shrunk to zero.
    pub fn over_regularized(control: f64, n_features: usize) -> Self {
        Self {
            control,
            weights: WeightVector::new(vec![0.0; n_features]).expect("zeros are valid"),
            dii: None,
            n_nonzero: 0,
        }
    }

    pub fn is_over_regularized(&self) -> bool {
        self.dii.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityPath {
    pub kind: PathKind,
    pub entries: Vec<PathEntry>,
}

impl SparsityPath {
    pub fn new(kind: PathKind, entries: Vec<PathEntry>) -> Self {
        Self { kind, entries }
    }

    /// Lowest-DII entry for every nonzero count. Flagged entries are skipped;
    /// on equal DII the earlier entry wins.
    pub fn best_per_cardinality(&self) -> BTreeMap<usize, &PathEntry> {
        let mut best: BTreeMap<usize, &PathEntry> = BTreeMap::new();
        for e in &self.entries {
            let Some(dii) = e.dii else { continue };
            let slot = best.entry(e.n_nonzero).or_insert(e);
            if dii < slot.dii.expect("only valid entries are stored") {
                *slot = e;
            }
        }
        best
    }

    pub fn best_with(&self, n_nonzero: usize) -> Option<&PathEntry> {
        self.best_per_cardinality().get(&n_nonzero).copied()
    }

    /// Columns `control, n_nonzero, dii` and one per feature. Undefined DII
    /// is written as an empty cell.
    pub fn write_csv<W: Write>(&self, out: W, feature_names: &[String]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["control".to_string(), "n_nonzero".into(), "dii".into()];
        header.extend(feature_names.iter().cloned());
        w.write_record(&header)?;
        for e in &self.entries {
            let mut rec = vec![
                e.control.to_string(),
                e.n_nonzero.to_string(),
                e.dii.map(|d| d.to_string()).unwrap_or_default(),
            ];
            rec.extend(e.weights.as_slice().iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Two columns: nonzero count and the best DII reached with it.
    pub fn write_plot_table<W: Write>(&self, out: W) -> Result<()> {
        let rows: Vec<Vec<f64>> = self
            .best_per_cardinality()
            .into_iter()
            .map(|(k, e)| vec![k as f64, e.dii.expect("bests are valid")])
            .collect();
        write_csv(out, &["n_nonzero".into(), "best_dii".into()], &rows)
    }
}
