//! Doubling ladder of chain lengths with overlapping halves: each rung is
//! twice the previous one minus the overlap, and the relaxation time grows
//! by at most a factor controlled by the chance of a vacancy in the overlap.

use crate::error::{Error, Result};
use crate::exact::{caps, relaxation_time};
use crate::Params;
use serde::Serialize;

/// One rung of the ladder.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LadderRung {
    /// chain length at this rung
    pub len: usize,
    /// probability that the overlap with the next rung holds no vacancy
    pub eps: f64,
    /// growth factor `2 / (1 - sqrt(eps))` inherited from the previous rung
    pub factor: Option<f64>,
    /// exact relaxation time where the length is small enough to solve
    pub relax: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockLadder {
    pub q: f64,
    pub rungs: Vec<LadderRung>,
}

impl BlockLadder {
    pub fn lengths(&self) -> Vec<usize> {
        self.rungs.iter().map(|r| r.len).collect()
    }

    /// Slack `factor * relax(i-1) - relax(i)` of the chained inequality at
    /// rung `i`, where both relaxation times were computed.
    pub fn chained_slack(&self, i: usize) -> Option<f64> {
        if i == 0 || i >= self.rungs.len() {
            return None;
        }
        let prev = self.rungs[i - 1].relax?;
        let cur = self.rungs[i].relax?;
        Some(self.rungs[i].factor? * prev - cur)
    }
}

/// Builds the ladder `len_1 = 3`, `len_i = 2 len_{i-1} - ceil(len_{i-1}/r)`
/// for `r` rungs, with the overlap fraction `1/r`.
pub fn block_ladder(r: usize, q: f64) -> Result<BlockLadder> {
    if r <= 2 {
        return Err(Error::InvalidArgument(format!(
            "ladder needs more than two rungs, got {}",
            r
        )));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::DensityOutOfRange {
            q,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mut rungs: Vec<LadderRung> = Vec::with_capacity(r);
    let mut len = 3usize;
    for i in 0..r {
        let overlap = len.div_ceil(r);
        let eps = (1.0 - q).powi(overlap as i32);
        let factor = (i > 0).then(|| 2.0 / (1.0 - rungs[i - 1].eps.sqrt()));
        let relax = if len <= caps::DENSE_EIGEN {
            Params::new_wide(len, q)
                .and_then(|p| relaxation_time(&p))
                .ok()
                .map(|s| s.value)
        } else {
            None
        };
        rungs.push(LadderRung {
            len,
            eps,
            factor,
            relax,
        });
        len = 2 * len - overlap;
    }
    Ok(BlockLadder { q, rungs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rungs_and_rejections() {
        let ladder = block_ladder(3, 0.2).unwrap();
        assert_eq!(ladder.lengths(), vec![3, 5, 8]);
        assert!(block_ladder(2, 0.2).is_err());
        assert!(block_ladder(3, 1.2).is_err());
    }

    #[test]
    fn length_envelope() {
        for r in 3..=20usize {
            let ladder = block_ladder(r, 0.2).unwrap();
            for (idx, rung) in ladder.rungs.iter().enumerate() {
                let i = idx as i32 + 1;
                let lower = 2f64.powi(i) * (1.0 - 1.0 / r as f64).powi(i);
                let upper = 2f64.powi(i + 1);
                let len = rung.len as f64;
                assert!(
                    lower <= len + 1e-9 && len <= upper + 1e-9,
                    "r={} rung {}: {} outside [{}, {}]",
                    r,
                    i,
                    len,
                    lower,
                    upper
                );
            }
        }
    }

    #[test]
    fn chained_relaxation_bound() {
        for q in [0.1, 0.2, 0.3] {
            let ladder = block_ladder(3, q).unwrap();
            for i in 1..3 {
                let slack = ladder.chained_slack(i).unwrap();
                assert!(
                    slack >= 0.0,
                    "q={} rung {}: chained bound violated by {}",
                    q,
                    i,
                    -slack
                );
            }
        }
    }
}
