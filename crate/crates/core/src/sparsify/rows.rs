use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{DiiError, Result};
use crate::rng::{stream_rng, Stream};

/// Which anchor rows enter the DII sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowMode {
    All,
    /// `ceil(f N)` rows.
    Fraction(f64),
    /// `min(m, N)` rows.
    Fixed(usize),
}

impl std::str::FromStr for RowMode {
    type Err = DiiError;
    /// `all`, `frac:<f>` or `fixed:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || DiiError::InvalidArgument(format!("bad row mode '{s}'"));
        if s == "all" {
            return Ok(RowMode::All);
        }
        match s.split_once(':') {
            Some(("frac", f)) => {
                let f: f64 = f.parse().map_err(|_| bad())?;
                if !(f > 0.0 && f <= 1.0) {
                    return Err(DiiError::InvalidArgument(format!(
                        "row fraction must be in (0, 1], got {f}"
                    )));
                }
                Ok(RowMode::Fraction(f))
            }
            Some(("fixed", m)) => Ok(RowMode::Fixed(m.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Anchor rows for a dataset of `n_points`, drawn once and sorted.
/// `All` returns `0..N` without touching the generator.
pub fn subsample_rows(n_points: usize, mode: RowMode, seed: u64) -> Result<Vec<usize>> {
    let n_rows = match mode {
        RowMode::All => return Ok((0..n_points).collect()),
        RowMode::Fraction(f) => (f * n_points as f64).ceil() as usize,
        RowMode::Fixed(m) => m.min(n_points),
    };
    if n_rows < 2 {
        return Err(DiiError::InvalidArgument(format!(
            "row subsampling keeps {n_rows} rows, need at least 2"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Rows);
    let mut rows = sample(&mut rng, n_points, n_rows).into_vec();
    rows.sort_unstable();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes() {
        assert_eq!(subsample_rows(4, RowMode::All, 0).unwrap(), [0, 1, 2, 3]);
        assert_eq!(subsample_rows(1500, RowMode::Fraction(0.5), 1).unwrap().len(), 750);
        assert_eq!(subsample_rows(1001, RowMode::Fraction(0.5), 1).unwrap().len(), 501);
        assert_eq!(subsample_rows(50, RowMode::Fixed(100), 1).unwrap().len(), 50);
        let rows = subsample_rows(10_000, RowMode::Fixed(100), 3).unwrap();
        assert!(rows.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(rows, subsample_rows(10_000, RowMode::Fixed(100), 3).unwrap());
    }

    #[test]
    fn too_few_rows() {
        assert!(subsample_rows(100, RowMode::Fixed(1), 0).is_err());
        assert!(subsample_rows(100, RowMode::Fraction(0.001), 0).is_err());
    }

    #[test]
    fn parse() {
        assert_eq!("all".parse::<RowMode>().unwrap(), RowMode::All);
        assert_eq!("frac:0.25".parse::<RowMode>().unwrap(), RowMode::Fraction(0.25));
        assert_eq!("fixed:100".parse::<RowMode>().unwrap(), RowMode::Fixed(100));
        for bad in ["frac:0", "frac:2", "fixed:x", "some"] {
            assert!(bad.parse::<RowMode>().is_err(), "{bad}");
        }
    }
}
