//! Dataset ingestion, synthetic benchmarks and evaluation metrics.

mod csv_io;
mod metrics;
pub mod synthetic;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use csv_io::{
    load_csv, load_csv_matrix, read_numeric_csv, write_bundle_csv, write_csv, ColumnRoles,
};
pub use metrics::{cosine_similarity, rescale_to_max, standardize, Moments};
pub use synthetic::{
    default_monomial_ground_truth, enumerate_monomials, gen_gaussian_benchmark,
    gen_monomial_benchmark, Monomial, GAUSSIAN_GT_WEIGHTS, MONOMIAL_GT,
};

use crate::error::{DiiError, Result};
use crate::math::{DataMatrix, RankMatrix, WeightVector};

/// The ground-truth space, either as raw features or as precomputed ranks.
#[derive(Debug, Clone)]
pub enum GroundTruth {
    Data(DataMatrix),
    Ranks(RankMatrix),
}

/// Input features paired with their ground truth.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub features: DataMatrix,
    /// `None` means the features are their own ground truth.
    pub ground_truth: Option<GroundTruth>,
    pub feature_names: Vec<String>,
    pub gt_names: Vec<String>,
    /// Known target weights, only for synthetic benchmarks.
    pub gt_weights: Option<WeightVector>,
    pub seed: Option<u64>,
}

impl DatasetBundle {
    /// Checks row counts and name uniqueness.
    pub fn validate(&self) -> Result<()> {
        let n = self.features.n_points();
        if self.feature_names.len() != self.features.n_features() {
            return Err(DiiError::ShapeMismatch(format!(
                "{} feature names for {} features",
                self.feature_names.len(),
                self.features.n_features()
            )));
        }
        let mut names: Vec<&String> = self.feature_names.iter().chain(&self.gt_names).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(DiiError::InvalidArgument(format!("duplicate name '{}'", w[0])));
        }
        let gt_rows = match &self.ground_truth {
            Some(GroundTruth::Data(b)) => b.n_points(),
            Some(GroundTruth::Ranks(r)) => r.n_cols(),
            None => n,
        };
        if gt_rows != n {
            return Err(DiiError::ShapeMismatch(format!(
                "{n} input points but {gt_rows} ground-truth points"
            )));
        }
        if let Some(w) = &self.gt_weights {
            if w.len() != self.features.n_features() {
                return Err(DiiError::ShapeMismatch(format!(
                    "{} ground-truth weights for {} features",
                    w.len(),
                    self.features.n_features()
                )));
            }
        }
        Ok(())
    }

    /// Ground-truth feature matrix. Without an explicit ground truth this is
    /// the standardized input features.
    pub fn ground_truth_data(&self) -> Result<DataMatrix> {
        match &self.ground_truth {
            Some(GroundTruth::Data(b)) => Ok(b.clone()),
            Some(GroundTruth::Ranks(_)) => Err(DiiError::InvalidArgument(
                "ground truth is only available as ranks".into(),
            )),
            None => Ok(standardize(&self.features).0),
        }
    }

    /// Ground-truth ranks seen from `row_ids`.
    pub fn ground_truth_ranks(&self, row_ids: &[usize]) -> Result<RankMatrix> {
        match &self.ground_truth {
            Some(GroundTruth::Ranks(r)) if r.row_ids() == row_ids => Ok(r.clone()),
            Some(GroundTruth::Ranks(_)) => Err(DiiError::ShapeMismatch(
                "precomputed ranks do not match the selected rows".into(),
            )),
            _ => RankMatrix::from_ground_truth(&self.ground_truth_data()?, row_ids),
        }
    }

    pub fn metadata(&self, generator: Option<&str>) -> BundleMetadata {
        BundleMetadata {
            n_points: self.features.n_points(),
            feature_names: self.feature_names.clone(),
            roles: ColumnRoles {
                ground_truth: self.gt_names.clone(),
                ignore: Vec::new(),
            },
            gt_weights: self.gt_weights.as_ref().map(|w| w.as_slice().to_vec()),
            seed: self.seed,
            generator: generator.map(str::to_owned),
        }
    }
}

/// JSON sidecar describing a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMetadata {
    pub n_points: usize,
    pub feature_names: Vec<String>,
    pub roles: ColumnRoles,
    #[serde(default)]
    pub gt_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub generator: Option<String>,
}

impl BundleMetadata {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(
            std::fs::File::open(path)?,
        ))?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// `data.csv` -> `data.meta.json`.
    pub fn sidecar_path(data_path: &Path) -> std::path::PathBuf {
        data_path.with_extension("meta.json")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsupervised_ground_truth_is_standardized() {
        let x = DataMatrix::from_rows(&[vec![0.0, 10.0], vec![1.0, 30.0], vec![2.0, 20.0]])
            .unwrap();
        let bundle = DatasetBundle {
            features: x,
            ground_truth: None,
            feature_names: vec!["a".into(), "b".into()],
            gt_names: vec![],
            gt_weights: None,
            seed: None,
        };
        bundle.validate().unwrap();
        let b = bundle.ground_truth_data().unwrap();
        for (_, std) in b.column_moments() {
            assert!((std - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn row_mismatch_detected() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let b = DataMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let bundle = DatasetBundle {
            features: x,
            ground_truth: Some(GroundTruth::Data(b)),
            feature_names: vec!["a".into()],
            gt_names: vec!["b".into()],
            gt_weights: None,
            seed: None,
        };
        assert!(bundle.validate().is_err());
    }

    #[test]
    fn metadata_round_trip() {
        let bundle = gen_gaussian_benchmark(10, &[1.0, 2.0], 4).unwrap();
        let meta = bundle.metadata(Some("gaussian"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.meta.json");
        meta.write(&path).unwrap();
        assert_eq!(BundleMetadata::read(&path).unwrap(), meta);
        assert_eq!(
            BundleMetadata::sidecar_path(Path::new("x/data.csv")),
            Path::new("x/data.meta.json")
        );
    }
}
