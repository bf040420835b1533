//! The distinguished-zero tracker: a vacancy is labeled at time zero and its
//! label moves one site left at each first legal ring of the site it sits
//! on, independently of the coin, absorbing at the frozen boundary.

use crate::error::{Error, Result};
use crate::model::Configuration;

use super::noise::NoiseField;

/// Piecewise-constant, non-increasing, right-continuous path of the label.
#[derive(Debug, Clone)]
pub struct ZeroPath {
    start_site: usize,
    /// Strictly increasing jump times; the k-th jump moves the label from
    /// `start_site - k + 1` to `start_site - k`.
    jumps: Vec<f64>,
}

impl ZeroPath {
    pub fn start_site(&self) -> usize {
        self.start_site
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jumps
    }

    /// Label position at time `s` (right-continuous).
    pub fn position(&self, s: f64) -> usize {
        let passed = self.jumps.iter().filter(|&&t| t <= s).count();
        self.start_site - passed
    }
}

/// Track the vacancy of `initial` at `x0` along the run on `noise` up to
/// `horizon`.
pub fn distinguished_zero(
    initial: Configuration,
    x0: usize,
    noise: &mut NoiseField,
    horizon: f64,
) -> Result<ZeroPath> {
    if x0 < 1 || x0 > initial.len() {
        return Err(Error::SiteOutOfRange {
            site: x0,
            len: initial.len(),
        });
    }
    if !initial.is_vacant(x0) {
        return Err(Error::InvalidArgument(format!(
            "distinguished zero must start on a vacancy, site {x0} holds a particle"
        )));
    }
    let mut cur = initial;
    let mut pos = x0;
    let mut jumps = Vec::new();
    for ring in noise.merged(horizon) {
        if pos == 0 {
            break;
        }
        if !cur.constraint(ring.site) {
            continue;
        }
        if ring.site == pos {
            // Legality means the site to the left is vacant (or the frozen
            // boundary), so the label lands on a vacancy again.
            jumps.push(ring.time);
            pos -= 1;
        }
        cur = cur.with_spin(ring.site, ring.coin as u8);
    }
    Ok(ZeroPath {
        start_site: x0,
        jumps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphical::{evolve, stream_rng};
    use crate::model::weight;
    use crate::Params;
    use rand::Rng;

    #[test]
    fn label_at_site_one_absorbs_at_the_first_ring() {
        let params = Params::new(3, 0.3).unwrap();
        for seed in 0..20 {
            let mut noise = NoiseField::sample(&params, 100.0, seed);
            let first = noise.rings(1)[0];
            let start = Configuration::from_str_spins("011").unwrap();
            let path = distinguished_zero(start, 1, &mut noise, 100.0).unwrap();
            assert_eq!(path.jump_times(), &[first]);
            assert_eq!(path.position(first), 0);
            assert_eq!(path.position(first * 0.5), 1);
        }
    }

    #[test]
    fn path_is_non_increasing_with_unit_jumps_and_sits_on_vacancies() {
        let params = Params::new(6, 0.3).unwrap();
        for seed in 0..50 {
            let mut noise = NoiseField::sample(&params, 80.0, seed);
            let start = Configuration::from_str_spins("110111").unwrap();
            let path = distinguished_zero(start, 3, &mut noise, 80.0).unwrap();
            for w in path.jump_times().windows(2) {
                assert!(w[0] < w[1]);
            }
            // Replay the configuration and confirm the label is always on a
            // vacancy (the frozen boundary counts as one).
            let mut replay_noise = NoiseField::sample(&params, 80.0, seed);
            let tr = evolve(start, &mut replay_noise, 80.0);
            let mut probes: Vec<f64> = tr.events.iter().map(|e| e.time).collect();
            probes.push(80.0);
            for &s in &probes {
                let z = path.position(s);
                assert!(tr.state_at(s).is_vacant(z), "seed {seed} time {s}");
            }
        }
    }

    #[test]
    fn law_right_of_the_label_stays_reversible() {
        // Start with the product law right of the labeled vacancy; at a
        // fixed later time, conditionally on the label's position, the
        // configuration right of it must still follow the product law.
        // Chi-square over cells pooled per label position, 99% level.
        let params = Params::new(6, 0.3).unwrap();
        let x0 = 2usize;
        let sample_at = 2.0f64;
        let n_seeds = 10_000u64;
        let mut counts: Vec<Vec<usize>> = (0..=x0).map(|z| vec![0usize; 1 << (6 - z)]).collect();

        for seed in 0..n_seeds {
            let mut init_rng = stream_rng(seed, u64::MAX - 1);
            let mut id = 0usize;
            // Site 1 occupied, the label's vacancy at site 2, sites 3..=6
            // drawn from the reversible product law.
            id |= 1;
            for x in 3..=6usize {
                if init_rng.gen::<f64>() < params.p() {
                    id |= 1 << (x - 1);
                }
            }
            let start = Configuration::from_id(id, 6).unwrap();
            let mut noise = NoiseField::sample(&params, sample_at, seed);
            let path = distinguished_zero(start, x0, &mut noise, sample_at).unwrap();
            let z = path.position(sample_at);
            let mut replay = NoiseField::sample(&params, sample_at, seed);
            let state = evolve(start, &mut replay, sample_at).state_at(sample_at);
            let mut cell = 0usize;
            for (j, x) in (z + 1..=6).enumerate() {
                cell |= (state.spin(x) as usize) << j;
            }
            counts[z][cell] += 1;
        }

        // Pool cells with small expected counts, per label position.
        let mut chi2 = 0.0f64;
        let mut df = 0i64;
        for (z, cells) in counts.iter().enumerate() {
            let n_z: usize = cells.iter().sum();
            if n_z < 100 {
                continue;
            }
            let sub = Params::new(6 - z, 0.3).unwrap();
            let mut pooled_obs = 0.0;
            let mut pooled_exp = 0.0;
            let mut used = 0i64;
            for (cell, &obs) in cells.iter().enumerate() {
                let cfg = Configuration::from_id(cell, 6 - z).unwrap();
                let expect = n_z as f64 * weight(cfg, &sub);
                if expect >= 5.0 {
                    chi2 += (obs as f64 - expect).powi(2) / expect;
                    used += 1;
                } else {
                    pooled_obs += obs as f64;
                    pooled_exp += expect;
                }
            }
            if pooled_exp > 0.0 {
                chi2 += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
                used += 1;
            }
            df += used - 1;
        }
        let dist = statrs::distribution::ChiSquared::new(df as f64).unwrap();
        let bound = statrs::distribution::ContinuousCDF::inverse_cdf(&dist, 0.99);
        assert!(chi2 < bound, "chi2 {chi2} df {df} bound {bound}");
    }
}
