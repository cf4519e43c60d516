use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::math::LambdaMode;
use crate::optimizer::{LearningRate, OptimizerConfig, Schedule};
use crate::sparsify::RowMode;

/// Flags shared by every data-driven subcommand. Each one may also come from
/// a JSON config file (same names, kebab-case); flags win.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Input CSV with a header row
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Comma-separated ground-truth columns of --data; `name*` matches a prefix
    #[arg(long, value_delimiter = ',')]
    pub gt_cols: Option<Vec<String>>,
    /// Separate CSV holding the ground-truth features, row-aligned with --data
    #[arg(long)]
    pub gt_data: Option<PathBuf>,
    /// Comma-separated columns of --data to drop
    #[arg(long, value_delimiter = ',')]
    pub ignore_cols: Option<Vec<String>>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Initial learning rate, or `auto`
    #[arg(long)]
    pub eta0: Option<String>,
    #[arg(long, value_parser = ["cosine", "exp", "both", "const"])]
    pub schedule: Option<String>,
    /// L1 penalty strength
    #[arg(long)]
    pub l1: Option<f64>,
    /// Softmax scale: `adaptive` or a positive number
    #[arg(long)]
    pub lambda: Option<String>,
    /// Anchor rows: `all`, `frac:<f>` or `fixed:<m>`
    #[arg(long)]
    pub rows: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with defaults for any of these flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Settings {
    /// Fills unset flags from the config file named by `--config`.
    pub fn with_config_file(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        let file: Settings = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        Ok(self.or(file))
    }

    fn or(self, other: Settings) -> Settings {
        Settings {
            data: self.data.or(other.data),
            gt_cols: self.gt_cols.or(other.gt_cols),
            gt_data: self.gt_data.or(other.gt_data),
            ignore_cols: self.ignore_cols.or(other.ignore_cols),
            epochs: self.epochs.or(other.epochs),
            eta0: self.eta0.or(other.eta0),
            schedule: self.schedule.or(other.schedule),
            l1: self.l1.or(other.l1),
            lambda: self.lambda.or(other.lambda),
            rows: self.rows.or(other.rows),
            seed: self.seed.or(other.seed),
            jobs: self.jobs.or(other.jobs),
            out: self.out.or(other.out),
            config: self.config,
        }
    }

    /// Applies built-in defaults and parses every value.
    pub fn resolve(&self, default_schedule: Schedule) -> Result<Resolved, CliError> {
        let usage = |e: crate::DiiError| CliError::Usage(e.to_string());
        let eta0 = match self.eta0.as_deref() {
            None | Some("auto") => LearningRate::Auto,
            Some(s) => LearningRate::Fixed(
                s.parse()
                    .map_err(|_| CliError::Usage(format!("bad --eta0 '{s}'")))?,
            ),
        };
        let schedule = match &self.schedule {
            Some(s) => s.parse().map_err(usage)?,
            None => default_schedule,
        };
        let lambda = match &self.lambda {
            Some(s) => s.parse().map_err(usage)?,
            None => LambdaMode::Adaptive,
        };
        let rows = match &self.rows {
            Some(s) => s.parse().map_err(usage)?,
            None => RowMode::All,
        };
        if self.gt_cols.is_some() && self.gt_data.is_some() {
            return Err(CliError::Usage("--gt-cols and --gt-data are exclusive".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let resolved = Resolved {
            data: self.data.clone(),
            gt_cols: self.gt_cols.clone(),
            gt_data: self.gt_data.clone(),
            ignore_cols: self.ignore_cols.clone().unwrap_or_default(),
            optimizer: OptimizerConfig {
                n_epochs: self.epochs.unwrap_or(100),
                eta0,
                schedule,
                l1_penalty: self.l1.unwrap_or(0.0),
                lambda,
                initial_weights: None,
                seed: self.seed.unwrap_or(0),
            },
            rows,
            seed: self.seed.unwrap_or(0),
            jobs: self.jobs,
            out: self.out.clone(),
        };
        resolved.optimizer.validate().map_err(usage)?;
        Ok(resolved)
    }
}

/// Every setting with defaults filled in. Recorded in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub data: Option<PathBuf>,
    pub gt_cols: Option<Vec<String>>,
    pub gt_data: Option<PathBuf>,
    pub ignore_cols: Vec<String>,
    pub optimizer: OptimizerConfig,
    pub rows: RowMode,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Resolved {
    pub fn out_dir(&self) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage("--out is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_defaults_fill_the_rest() {
        let flags = Settings {
            epochs: Some(7),
            ..Default::default()
        };
        let file: Settings =
            serde_json::from_str(r#"{"epochs": 50, "l1": 0.001, "schedule": "exp"}"#).unwrap();
        let r = flags.or(file).resolve(Schedule::Cosine).unwrap();
        assert_eq!(r.optimizer.n_epochs, 7);
        assert_eq!(r.optimizer.l1_penalty, 0.001);
        assert_eq!(r.optimizer.schedule, Schedule::Exponential);
        assert_eq!(r.optimizer.lambda, LambdaMode::Adaptive);
        assert_eq!(r.rows, RowMode::All);
    }

    #[test]
    fn unknown_config_keys_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"epoch": 5}"#).is_err());
    }

    #[test]
    fn zero_epochs_is_usage_error() {
        let s = Settings {
            epochs: Some(0),
            ..Default::default()
        };
        assert!(matches!(s.resolve(Schedule::Cosine), Err(CliError::Usage(_))));
    }
}
