use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::DiiError;

/// Learning-rate decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Constant,
    /// `0.5 η0 (1 + cos(π k / n_epochs))`
    Cosine,
    /// `η0 2^(-k/10)`: halves every ten epochs.
    Exponential,
    /// Runs cosine and exponential, keeps the lower-DII result.
    Best,
}

impl std::str::FromStr for Schedule {
    type Err = DiiError;
    fn from_str(s: &str) -> Result<Self, DiiError> {
        match s {
            "const" | "constant" => Ok(Schedule::Constant),
            "cos" | "cosine" => Ok(Schedule::Cosine),
            "exp" | "exponential" => Ok(Schedule::Exponential),
            "both" | "best" => Ok(Schedule::Best),
            _ => Err(DiiError::InvalidArgument(format!("unknown schedule '{s}'"))),
        }
    }
}

/// Learning rate for epoch `k` of `n_epochs`.
///
/// `Best` has no rate of its own and is treated as cosine; the optimizer
/// expands it into two runs before this is called.
pub fn learning_rate(k: usize, eta0: f64, n_epochs: usize, schedule: Schedule) -> f64 {
    match schedule {
        Schedule::Constant => eta0,
        Schedule::Cosine | Schedule::Best => {
            0.5 * eta0 * (1.0 + (PI * k as f64 / n_epochs as f64).cos())
        }
        Schedule::Exponential => eta0 * 2f64.powf(-(k as f64) / 10.0),
    }
}
