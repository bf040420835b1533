//! Parameter grids swept by the scenarios: chain lengths, vacancy densities,
//! mesoscopic exponents and prefactors, plus the seed and per-row trial
//! budget for the sampled columns.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub lens: Vec<usize>,
    pub qs: Vec<f64>,
    pub gammas: Vec<f64>,
    pub ds: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            lens: (1..=8).collect(),
            qs: vec![0.05, 0.1, 0.2, 0.3],
            gammas: vec![0.5, 1.0],
            ds: vec![1.0],
            seed: 1729,
            trials: 2000,
        }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.lens.is_empty() || self.qs.is_empty() {
            return Err(Error::InvalidArgument(
                "the grid needs at least one length and one density".into(),
            ));
        }
        if let Some(&l) = self.lens.iter().find(|&&l| l == 0 || l > 32) {
            return Err(Error::InvalidArgument(format!(
                "grid length {} outside [1, 32]",
                l
            )));
        }
        if let Some(&q) = self.qs.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
            return Err(Error::DensityOutOfRange {
                q,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if let Some(&g) = self.gammas.iter().find(|&&g| !(0.0..=1.0).contains(&g)) {
            return Err(Error::InvalidArgument(format!(
                "mesoscopic exponent {} outside [0, 1]",
                g
            )));
        }
        if let Some(&d) = self.ds.iter().find(|&&d| d.is_nan() || d <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "length prefactor {} must be positive",
                d
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        Ok(())
    }

    /// Densities from the largest down, the direction every trend reads.
    pub fn qs_descending(&self) -> Vec<f64> {
        let mut qs = self.qs.clone();
        qs.sort_by(|a, b| b.total_cmp(a));
        qs.dedup();
        qs
    }
}

/// `ceil(d / q^gamma)` sites, never fewer than one. The rounded value is
/// echoed in every report that uses it.
pub fn length_scale(d: f64, q: f64, gamma: f64) -> usize {
    ((d / q.powf(gamma)).ceil() as usize).max(1)
}
