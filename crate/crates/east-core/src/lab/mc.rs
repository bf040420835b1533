//! Sampling estimators on top of the graphical construction: hitting-time
//! draws, event frequencies at a fixed time, and the Kolmogorov-Smirnov
//! distance from the unit exponential.

use crate::error::Result;
use crate::graphical::{evolve_thinned, sample_hitting_widening, NoiseField, Trajectory};
use crate::{Configuration, Params};
use rayon::prelude::*;

/// Independent hitting-time draws, one seed per trial, in seed order.
pub fn sample_taus(
    params: &Params,
    start: Configuration,
    target: impl Fn(Configuration) -> bool + Sync,
    seeds: std::ops::Range<u64>,
    cap: f64,
) -> Result<Vec<f64>> {
    seeds
        .into_par_iter()
        .map(|s| sample_hitting_widening(params, start, &target, s, cap))
        .collect()
}

/// Sample mean and its standard error.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Kolmogorov-Smirnov distance between the sample, already scaled to unit
/// mean, and the exponential law `F(x) = 1 - exp(-x)`.
pub fn ks_exponential(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = 1.0 - (-x).exp();
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Runs one thinned trajectory per seed up to `horizon` and hands each to
/// `stat`; the per-trial statistics come back in seed order.
pub fn per_trial<T: Send>(
    params: &Params,
    start: Configuration,
    horizon: f64,
    seeds: std::ops::Range<u64>,
    stat: impl Fn(&Trajectory) -> T + Sync,
) -> Vec<T> {
    seeds
        .into_par_iter()
        .map(|s| {
            let mut noise = NoiseField::sample(params, horizon, s);
            stat(&evolve_thinned(start, &mut noise, horizon))
        })
        .collect()
}

/// Frequency of `event` on the state at time `t`, with its binomial
/// standard error.
pub fn event_frequency_at(
    params: &Params,
    start: Configuration,
    t: f64,
    seeds: std::ops::Range<u64>,
    event: impl Fn(Configuration) -> bool + Sync,
) -> (f64, f64) {
    let n = (seeds.end - seeds.start) as f64;
    let hits: u64 = per_trial(params, start, t, seeds, |traj| {
        event(traj.state_at(t)) as u64
    })
    .into_iter()
    .sum();
    let f = hits as f64 / n;
    (f, binomial_se(f, n))
}

pub fn binomial_se(f: f64, n: f64) -> f64 {
    (f * (1.0 - f) / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::mean_hitting_time;
    use crate::exact::StateSet;

    #[test]
    fn ks_vanishes_on_exact_quantiles() {
        // midpoint quantiles of Exp(1) keep every step centred on the cdf
        let n = 1000;
        let xs: Vec<f64> = (0..n)
            .map(|i| -(1.0 - (i as f64 + 0.5) / n as f64).ln())
            .collect();
        assert!(ks_exponential(&xs) < 1.0 / n as f64);
        // a constant sample is as far from exponential as possible
        assert!(ks_exponential(&vec![1.0; 100]) > 0.6);
    }

    #[test]
    fn tau_sample_mean_matches_exact_two_state() {
        // L=1: tau is exactly Exp(p), mean 1/p
        let params = Params::new_wide(1, 0.3).unwrap();
        let start = Configuration::single_right_vacancy(1);
        let taus = sample_taus(&params, start, |c| c.spin(1) == 1, 0..4000, 1e6).unwrap();
        let (mean, se) = mean_and_se(&taus);
        let exact = mean_hitting_time(
            &params,
            start,
            &StateSet::spin_is(1, 1, 1),
        )
        .unwrap()
        .value;
        assert!((mean - exact).abs() < 4.0 * se, "{} vs {}", mean, exact);
        let scaled: Vec<f64> = taus.iter().map(|t| t / exact).collect();
        assert!(ks_exponential(&scaled) < 0.03);
    }

    #[test]
    fn draws_are_reproducible_and_seed_ordered() {
        let params = Params::new_wide(3, 0.2).unwrap();
        let start = Configuration::single_right_vacancy(3);
        let a = sample_taus(&params, start, |c| c.spin(3) == 1, 5..25, 1e6).unwrap();
        let b = sample_taus(&params, start, |c| c.spin(3) == 1, 5..25, 1e6).unwrap();
        assert_eq!(a, b);
        let shifted = sample_taus(&params, start, |c| c.spin(3) == 1, 6..25, 1e6).unwrap();
        assert_eq!(a[1..], shifted[..]);
    }

    #[test]
    fn fixed_time_frequency_tracks_the_semigroup() {
        // vacancy probability at the single site from the occupied start:
        // q (1 - e^{-t}); at t = ln 2 that is q / 2
        let params = Params::new_wide(1, 0.2).unwrap();
        let t = 2f64.ln();
        let (f, se) = event_frequency_at(
            &params,
            Configuration::all_ones(1),
            t,
            0..8000,
            |c| c.is_vacant(1),
        );
        assert!((f - 0.1).abs() < 4.0 * se, "freq {} se {}", f, se);
    }
}
