//! Interval-growing certificate for boundary members: starting from the
//! two-site interval at a witness, repeatedly absorb the vacancy nearest to
//! the current border until the whole chain `[0, L]` is covered. The
//! recorded sites, distances and directions witness how many vacancies the
//! configuration must carry and where they can sit.

use super::stages::in_astar;
use crate::error::{Error, Result};
use crate::model::Configuration;
use serde::Serialize;

/// The full trace of the interval-growing run.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaChain {
    /// witness site the run started from
    pub z0: usize,
    /// absorbed vacancy sites `z_1..z_K` in `[0, L]`, first one `z0 - 1`
    pub sites: Vec<usize>,
    /// absorption distances `d_1..d_K` with `d_1 = 1`
    pub distances: Vec<usize>,
    /// growth directions for steps `2..K`: `-1` left of the interval, `+1` right
    pub signs: Vec<i8>,
    /// nested intervals, ending at `(0, L)`
    pub intervals: Vec<(usize, usize)>,
}

impl DeltaChain {
    pub fn k(&self) -> usize {
        self.sites.len()
    }

    /// Interval lengths, the running sums of the distances.
    pub fn lengths(&self) -> Vec<usize> {
        self.intervals.iter().map(|&(a, b)| b - a).collect()
    }
}

/// Runs the interval-growing algorithm for a boundary member and one of its
/// witnesses. At each step the flanks of the current interval `[a, b]` are
/// searched outwards, left candidates up to distance `b - a - 1`, right
/// candidates up to `b - a`, taking the left one on distance ties.
pub fn delta_chain(eta: Configuration, z0: usize) -> Result<DeltaChain> {
    let l = eta.len();
    if z0 < 1 || z0 > l {
        return Err(Error::SiteOutOfRange { site: z0, len: l });
    }
    if !in_astar(eta) || !eta.constraint(z0) || in_astar(eta.flipped(z0)) {
        return Err(Error::InvalidArgument(format!(
            "site {} is not a boundary witness for {}",
            z0, eta
        )));
    }
    let vacant = |y: usize| eta.spin(y) == 0;
    let (mut a, mut b) = (z0 - 1, z0);
    let mut chain = DeltaChain {
        z0,
        sites: vec![z0 - 1],
        distances: vec![1],
        signs: Vec::new(),
        intervals: vec![(a, b)],
    };
    while !(a == 0 && b == l) {
        let ell = b - a;
        let mut found = None;
        for t in 1..=ell {
            if t < ell && a >= t && vacant(a - t) {
                found = Some((a - t, t, -1i8));
                break;
            }
            if b + t <= l && vacant(b + t) {
                found = Some((b + t, t, 1i8));
                break;
            }
        }
        let (z, t, sign) = found.expect("a boundary member always flanks a vacancy");
        chain.sites.push(z);
        chain.distances.push(t);
        chain.signs.push(sign);
        a = a.min(z);
        b = b.max(z);
        chain.intervals.push((a, b));
    }
    Ok(chain)
}
