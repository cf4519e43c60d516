use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::{DatasetBundle, GroundTruth};
use crate::error::{DiiError, Result};
use crate::math::DataMatrix;

/// Which columns of a CSV go to the ground-truth space or are dropped.
/// Everything else is an input feature. A trailing `*` matches a prefix.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ColumnRoles {
    #[serde(default)]
    pub ground_truth: Vec<String>,
    #[serde(default)]
    pub ignore: Vec<String>,
}

fn matches(pattern: &str, name: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => name.starts_with(prefix),
        None => pattern == name,
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Role {
    Feature,
    GroundTruth,
    Ignore,
}

/// Reads a header plus numeric rows. Returns the header and row-major values.
pub fn read_numeric_csv(path: &Path) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.is_empty() {
        return Err(DiiError::Csv(format!("{}: empty header", path.display())));
    }
    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h) {
            return Err(DiiError::Csv(format!("duplicate header '{h}'")));
        }
    }
    let mut values = Vec::new();
    let mut n_rows = 0;
    for (r, record) in reader.records().enumerate() {
        // data rows are 1-based, header excluded
        let row = r + 1;
        let record = record.map_err(|e| DiiError::Csv(format!("row {row}: {e}")))?;
        if record.len() != header.len() {
            return Err(DiiError::Csv(format!(
                "row {row}: {} fields, header has {}",
                record.len(),
                header.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                DiiError::Csv(format!(
                    "row {row}, column '{}': non-numeric cell '{cell}'",
                    header[c]
                ))
            })?;
            if !v.is_finite() {
                return Err(DiiError::Csv(format!(
                    "row {row}, column '{}': non-finite value '{cell}'",
                    header[c]
                )));
            }
            values.push(v);
        }
        n_rows += 1;
    }
    Ok((header, values, n_rows))
}

/// Loads a CSV and splits its columns by role. Without ground-truth columns
/// the bundle's ground truth stays unset.
pub fn load_csv(path: &Path, roles: &ColumnRoles) -> Result<DatasetBundle> {
    let (header, values, n_rows) = read_numeric_csv(path)?;
    for pattern in roles.ground_truth.iter().chain(&roles.ignore) {
        if !header.iter().any(|h| matches(pattern, h)) {
            return Err(DiiError::InvalidArgument(format!(
                "column '{pattern}' not found in {}",
                path.display()
            )));
        }
    }
    let role_of: Vec<Role> = header
        .iter()
        .map(|h| {
            if roles.ignore.iter().any(|p| matches(p, h)) {
                Role::Ignore
            } else if roles.ground_truth.iter().any(|p| matches(p, h)) {
                Role::GroundTruth
            } else {
                Role::Feature
            }
        })
        .collect();
    let pick = |role: Role| -> Vec<usize> {
        (0..header.len()).filter(|&c| role_of[c] == role).collect()
    };
    let (feat_cols, gt_cols) = (pick(Role::Feature), pick(Role::GroundTruth));
    if feat_cols.is_empty() {
        return Err(DiiError::InvalidArgument("no feature columns left".into()));
    }
    let full = DataMatrix::new(values, n_rows, header.len())?;
    let features = full.select_columns(&feat_cols)?;
    let ground_truth = if gt_cols.is_empty() {
        None
    } else {
        Some(GroundTruth::Data(full.select_columns(&gt_cols)?))
    };
    Ok(DatasetBundle {
        features,
        ground_truth,
        feature_names: feat_cols.iter().map(|&c| header[c].clone()).collect(),
        gt_names: gt_cols.iter().map(|&c| header[c].clone()).collect(),
        gt_weights: None,
        seed: None,
    })
}

/// Loads every column of a CSV as one matrix.
pub fn load_csv_matrix(path: &Path) -> Result<(Vec<String>, DataMatrix)> {
    let (header, values, n_rows) = read_numeric_csv(path)?;
    let n = header.len();
    Ok((header, DataMatrix::new(values, n_rows, n)?))
}

/// Writes a header and rows of floats. Values use Rust's shortest
/// round-trip formatting, so output is byte-stable.
pub fn write_csv<W: Write>(out: W, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes features and (if present) ground-truth columns side by side.
pub fn write_bundle_csv(path: &Path, bundle: &DatasetBundle) -> Result<()> {
    let gt = match &bundle.ground_truth {
        Some(GroundTruth::Data(b)) => Some(b),
        Some(GroundTruth::Ranks(_)) => {
            return Err(DiiError::InvalidArgument(
                "rank-only ground truth cannot be written as CSV".into(),
            ))
        }
        None => None,
    };
    let mut header = bundle.feature_names.clone();
    if gt.is_some() {
        header.extend(bundle.gt_names.iter().cloned());
    }
    let rows: Vec<Vec<f64>> = (0..bundle.features.n_points())
        .map(|i| {
            let mut row = bundle.features.row(i).to_vec();
            if let Some(b) = gt {
                row.extend_from_slice(b.row(i));
            }
            row
        })
        .collect();
    write_csv(std::fs::File::create(path)?, &header, &rows)
}
