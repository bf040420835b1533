//! Hitting-time sampling with O(1) memory: the union of the per-site clocks
//! is one rate-`L` clock whose rings land on a uniform site, so the walk can
//! be streamed without materializing a noise field.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Configuration;
use crate::Params;

use super::noise::stream_rng;

/// Default time cap for one sample.
pub const DEFAULT_CAP: f64 = 1e6;

/// Stream tag for the superposed clock; far above any site index.
const HITTING_TAG: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HitSample {
    Hit(f64),
    /// The trajectory ran to the cap without entering the target.
    CapExceeded,
}

/// First time the trajectory from `start` enters the target set, or
/// [`HitSample::CapExceeded`].
pub fn sample_hitting(
    params: &Params,
    start: Configuration,
    target: impl Fn(Configuration) -> bool,
    seed: u64,
    cap: f64,
) -> HitSample {
    assert!(cap > 0.0);
    let l = params.len();
    let p = params.p();
    let mut rng = stream_rng(seed, HITTING_TAG);
    let mut cur = start;
    if target(cur) {
        return HitSample::Hit(0.0);
    }
    let mut t = 0.0f64;
    loop {
        let u: f64 = rng.gen();
        t += -(1.0 - u).ln() / l as f64;
        let site = rng.gen_range(1..=l);
        let coin = rng.gen::<f64>() < p;
        if t > cap {
            return HitSample::CapExceeded;
        }
        if cur.constraint(site) {
            cur = cur.with_spin(site, coin as u8);
            if target(cur) {
                return HitSample::Hit(t);
            }
        }
    }
}

/// One sample with the cap widened tenfold up to three times before giving
/// up, for the heavy-tailed small-`q` regime.
pub fn sample_hitting_widening(
    params: &Params,
    start: Configuration,
    target: impl Fn(Configuration) -> bool,
    seed: u64,
    cap: f64,
) -> Result<f64> {
    let mut cap = cap;
    for _ in 0..4 {
        match sample_hitting(params, start, &target, seed, cap) {
            HitSample::Hit(t) => return Ok(t),
            HitSample::CapExceeded => cap *= 10.0,
        }
    }
    Err(Error::HorizonExceeded { cap: cap / 10.0 })
}

/// Sample mean and standard error of the hitting time over consecutive
/// seeds.
pub fn hitting_mean(
    params: &Params,
    start: Configuration,
    target: impl Fn(Configuration) -> bool + Sync,
    seeds: std::ops::Range<u64>,
    cap: f64,
) -> Result<(f64, f64)> {
    use rayon::prelude::*;
    let samples: Result<Vec<f64>> = seeds
        .clone()
        .into_par_iter()
        .map(|s| sample_hitting_widening(params, start, &target, s, cap))
        .collect();
    let samples = samples?;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{mean_hitting_time, StateSet};

    #[test]
    fn single_site_mean_matches_the_closed_form() {
        // E[tau] = 1/p from the vacancy; 1e5 samples within 3 standard
        // errors.
        let params = Params::new(1, 0.3).unwrap();
        let start = Configuration::single_right_vacancy(1);
        let (mean, se) =
            hitting_mean(&params, start, |c| c.spin(1) == 1, 0..100_000, DEFAULT_CAP).unwrap();
        assert!((mean - 1.0 / 0.7).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn sampled_mean_agrees_with_the_linear_solve() {
        let params = Params::new(6, 0.2).unwrap();
        let start = Configuration::single_right_vacancy(6);
        let target = StateSet::spin_is(6, 6, 1);
        let exact = mean_hitting_time(&params, start, &target).unwrap().value;
        let (mean, se) = hitting_mean(
            &params,
            start,
            |c| c.spin(6) == 1,
            0..4000,
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(
            (mean - exact).abs() < 4.0 * se,
            "mc {mean} +- {se} vs exact {exact}"
        );
    }

    #[test]
    fn same_seed_reproduces_the_sample() {
        let params = Params::new(4, 0.25).unwrap();
        let start = Configuration::all_ones(4);
        let a = sample_hitting(&params, start, |c| c.spin(4) == 0, 42, DEFAULT_CAP);
        let b = sample_hitting(&params, start, |c| c.spin(4) == 0, 42, DEFAULT_CAP);
        assert_eq!(a, b);
    }

    #[test]
    fn cap_reports_instead_of_hanging() {
        let params = Params::new(4, 0.25).unwrap();
        let start = Configuration::all_ones(4);
        // An unreachable target: the frozen boundary keeps site 1
        // unconstrained, but no configuration has five vacancies here.
        let out = sample_hitting(&params, start, |c| c.vacancy_count() > 4, 7, 50.0);
        assert_eq!(out, HitSample::CapExceeded);
    }
}
