//! All `2^L` initial conditions evolved on one shared noise field, packed
//! bit-parallel: one word-vector per site, one bit per ensemble member.

use crate::error::{Error, Result};
use crate::model::Configuration;
use crate::Params;

use super::noise::NoiseField;
use super::COUPLING_CAP;

/// What the shared-noise replay observed on `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct CouplingReport {
    /// Per site `x`, the first legal ring time at `x` in the run started
    /// from all ones (`f64::INFINITY` when not seen before the horizon).
    pub tau_site: Vec<f64>,
    /// First time every initial condition has reached the same state.
    pub coupling_time: f64,
    /// Times `t >= tau_site[x-1]` at which some member disagreed with the
    /// all-ones run somewhere in `[1, x]`. Must stay zero.
    pub prefix_violations: usize,
    pub horizon: f64,
}

impl CouplingReport {
    pub fn fully_coupled(&self) -> bool {
        self.coupling_time.is_finite()
    }

    /// All pairs coupled no later than the first legal ring at the last
    /// site of the all-ones run.
    pub fn coupled_by_last_tau(&self) -> bool {
        self.coupling_time <= *self.tau_site.last().unwrap()
    }
}

/// Evolve every initial configuration on the shared noise and check that
/// once the all-ones run has had a legal ring at `x`, the whole ensemble
/// agrees on `[1, x]` from that moment on.
pub fn couple_all(params: &Params, noise: &mut NoiseField, horizon: f64) -> Result<CouplingReport> {
    let l = params.len();
    if l > COUPLING_CAP {
        return Err(Error::LengthCap {
            op: "ensemble coupling",
            cap: COUPLING_CAP,
            len: l,
        });
    }
    let members = 1usize << l;
    let words = members.div_ceil(64);
    let last_full = if members.is_multiple_of(64) {
        u64::MAX
    } else {
        (1u64 << (members % 64)) - 1
    };
    let full = |w: usize| if w + 1 == words { last_full } else { u64::MAX };

    // spins[x-1] holds the bit of every member's spin at x; member m starts
    // in the configuration with id m.
    let mut spins: Vec<Vec<u64>> = (0..l)
        .map(|x| {
            (0..words)
                .map(|w| {
                    let mut acc = 0u64;
                    for b in 0..64 {
                        let m = w * 64 + b;
                        if m < members && m & (1 << x) != 0 {
                            acc |= 1 << b;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();

    let ones_member = members - 1;
    let bit_of = |v: &[u64], m: usize| (v[m / 64] >> (m % 64)) & 1;

    let mut tau_site = vec![f64::INFINITY; l];
    let mut coupling_time = f64::INFINITY;
    let mut prefix_violations = 0usize;
    let mut legal = vec![0u64; words];

    for ring in noise.merged(horizon) {
        let x = ring.site;
        if x == 1 {
            for (w, slot) in legal.iter_mut().enumerate() {
                *slot = full(w);
            }
        } else {
            for w in 0..words {
                legal[w] = !spins[x - 2][w] & full(w);
            }
        }
        if tau_site[x - 1].is_infinite() && bit_of(&legal, ones_member) == 1 {
            tau_site[x - 1] = ring.time;
        }
        {
            let row = &mut spins[x - 1];
            if ring.coin {
                for w in 0..words {
                    row[w] |= legal[w];
                }
            } else {
                for w in 0..words {
                    row[w] &= !legal[w];
                }
            }
        }

        // Uniform prefix after this event.
        let mut uniform_prefix = 0;
        for (y, row) in spins.iter().enumerate() {
            let all_zero = row.iter().all(|&w| w == 0);
            let all_one = (0..words).all(|w| row[w] == full(w));
            if all_zero || all_one {
                uniform_prefix = y + 1;
            } else {
                break;
            }
        }
        let claimed = (0..l)
            .rev()
            .find(|&y| tau_site[y] <= ring.time)
            .map(|y| y + 1)
            .unwrap_or(0);
        if uniform_prefix < claimed {
            prefix_violations += 1;
        }
        if uniform_prefix == l && coupling_time.is_infinite() {
            coupling_time = ring.time;
        }
        if coupling_time.is_finite() && tau_site.iter().all(|t| t.is_finite()) {
            break;
        }
    }

    Ok(CouplingReport {
        tau_site,
        coupling_time,
        prefix_violations,
        horizon,
    })
}

/// Widen the horizon geometrically until the ensemble couples and every
/// site's first legal ring is materialized.
pub fn couple_all_adaptive(
    params: &Params,
    seed: u64,
    mut horizon: f64,
    max_doublings: usize,
) -> Result<CouplingReport> {
    let mut noise = NoiseField::sample(params, horizon, seed);
    for _ in 0..=max_doublings {
        let report = couple_all(params, &mut noise, horizon)?;
        if report.fully_coupled() && report.tau_site.iter().all(|t| t.is_finite()) {
            return Ok(report);
        }
        horizon *= 4.0;
    }
    Err(Error::HorizonExceeded { cap: horizon })
}

/// First legal ring at each site for a single run; used to cross-check the
/// bit-parallel replay against the scalar evolution.
pub fn first_legal_rings(start: Configuration, noise: &mut NoiseField, horizon: f64) -> Vec<f64> {
    let l = start.len();
    let mut cur = start;
    let mut tau = vec![f64::INFINITY; l];
    for ring in noise.merged(horizon) {
        if cur.constraint(ring.site) {
            if tau[ring.site - 1].is_infinite() {
                tau[ring.site - 1] = ring.time;
            }
            cur = cur.with_spin(ring.site, ring.coin as u8);
        }
    }
    tau
}
