//! Deterministic coarsening sweep: ordered single-site stages that fill a
//! vacancy exactly when its distance to the nearest vacancy on its left
//! equals the stage level. The endpoint of the sweep sorts configurations
//! into those that collapse onto the lone right-edge vacancy and the rest.

use crate::model::Configuration;
use serde::Serialize;

/// One stage of the sweep: act on site `x` at gap level `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StageIndex {
    pub d: usize,
    pub x: usize,
}

impl PartialOrd for StageIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Stages run by increasing level and, within a level, from the right edge
/// towards the origin.
impl Ord for StageIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d.cmp(&other.d).then(other.x.cmp(&self.x))
    }
}

/// Stage visited at position `k` (1-based) of the sweep over `[1, l]`².
pub fn stage_at(k: usize, l: usize) -> StageIndex {
    debug_assert!(k >= 1 && k <= l * l);
    StageIndex {
        d: (k - 1) / l + 1,
        x: l - (k - 1) % l,
    }
}

/// Position of `stage` in the sweep; inverse of `stage_at`.
pub fn stage_rank(stage: StageIndex, l: usize) -> usize {
    (stage.d - 1) * l + (l - stage.x) + 1
}

/// Fills the vacancy at `x` when its gap is exactly `d`, otherwise leaves
/// the configuration alone. Never creates a vacancy.
pub fn det_step(eta: Configuration, d: usize, x: usize) -> Configuration {
    debug_assert!((1..=eta.len()).contains(&d) && (1..=eta.len()).contains(&x));
    if eta.is_vacant(x) && eta.gap(x) == d {
        eta.with_spin(x, 1)
    } else {
        eta
    }
}

/// Runs every stage through level `L - 1` at site 1, returning the endpoint
/// and the stages that acted.
pub fn det_dynamics(eta: Configuration) -> (Configuration, Vec<StageIndex>) {
    let l = eta.len();
    let mut cur = eta;
    let mut trace = Vec::new();
    for k in 1..=l.saturating_sub(1) * l {
        let stage = stage_at(k, l);
        let next = det_step(cur, stage.d, stage.x);
        if next != cur {
            trace.push(stage);
            cur = next;
        }
    }
    (cur, trace)
}

/// Same endpoint as `det_dynamics`, one simultaneous pass per gap level:
/// pass `d` erases every vacancy whose gap is exactly `d`. Gaps only look
/// left, so the simultaneous erasure equals the right-to-left stage sweep.
pub fn det_passes(eta: Configuration) -> Configuration {
    let l = eta.len();
    let mut cur = eta;
    for d in 1..l {
        let mut mask: u32 = 0;
        let mut last = 0usize;
        for x in 1..=l {
            if cur.is_vacant(x) {
                if x - last == d {
                    mask |= 1 << (x - 1);
                }
                last = x;
            }
        }
        while mask != 0 {
            let x = mask.trailing_zeros() as usize + 1;
            cur = cur.with_spin(x, 1);
            mask &= mask - 1;
        }
    }
    cur
}

/// Whether the coarsening run ends in the single vacancy at the right edge.
pub fn in_astar(eta: Configuration) -> bool {
    det_passes(eta) == Configuration::single_right_vacancy(eta.len())
}
