//! Hitting-time distributions and the mixing time, through the absorbing
//! semigroup. Two independent evaluation routes are kept: a uniformised
//! series with certified truncation error, and a spectral series on the
//! absorbing system for the large `t` regime where the series length would
//! explode.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::Configuration;

use super::generator::Generator;
use super::set::StateSet;
use super::spectral::FullSpectral;
use super::Solved;

/// Poisson mass outside the summation window is kept below this.
const UNIF_TAIL: f64 = 1e-13;
/// Switch from the uniformised series to the spectral series once the
/// expected series length `rate * t` passes this.
const UNIF_SWITCH: f64 = 2e4;
/// Largest absorbing system the spectral series will eigendecompose.
const SERIES_CAP: usize = 4096;

/// `P_start(tau_target > t)` by the uniformised series on the absorbing
/// chain, with truncation error below `1e-12`. Also returns the number of
/// series terms taken.
pub fn survival_uniformised(
    gen: &Generator,
    start: Configuration,
    target: &StateSet,
    t: f64,
) -> Result<(f64, usize)> {
    target.validate_target()?;
    if target.contains(start.id()) {
        return Ok((0.0, 0));
    }
    if t <= 0.0 {
        return Ok((1.0, 0));
    }
    let n = gen.n();
    // Uniformisation constant: max holding rate off the target, plus one.
    let rate = target
        .iter_complement()
        .map(|id| gen.holding(id))
        .fold(0.0f64, f64::max)
        + 1.0;
    let a = rate * t;

    let weights = poisson_window(a);
    let k_max = weights.last;

    // v_k = M^k 1 on the complement, M = I + G|_CC / rate.
    let mut v: Vec<f64> = (0..n)
        .map(|i| if target.contains(i) { 0.0 } else { 1.0 })
        .collect();
    let mut next = vec![0.0; n];
    let mut acc = 0.0;
    let start_id = start.id();
    for k in 0..=k_max {
        acc += weights.mass(k) * v[start_id];
        if k == k_max {
            break;
        }
        uniform_step(gen, target, rate, &v, &mut next);
        std::mem::swap(&mut v, &mut next);
    }
    Ok((acc.clamp(0.0, 1.0), k_max + 1))
}

/// One uniformised step `next = (I + G|_CC / rate) v`, both vectors supported
/// off the target.
fn uniform_step(gen: &Generator, target: &StateSet, rate: f64, v: &[f64], next: &mut [f64]) {
    let (q, p) = (gen.params().q(), gen.params().p());
    for id in 0..gen.n() {
        if target.contains(id) {
            next[id] = 0.0;
            continue;
        }
        let mut acc = (1.0 - gen.holding(id) / rate) * v[id];
        let mut legal = gen.legal_sites(id);
        while let Some(site) = legal.next_site() {
            let bit = 1usize << (site - 1);
            let to = id ^ bit;
            if !target.contains(to) {
                let k = if id & bit != 0 { q } else { p };
                acc += k / rate * v[to];
            }
        }
        next[id] = acc;
    }
}

/// Poisson(a) probabilities over a window that carries all but `UNIF_TAIL`
/// of the mass, evaluated stably in log space for large `a`.
struct PoissonWindow {
    first: usize,
    last: usize,
    mass_by_k: Vec<f64>,
}

impl PoissonWindow {
    fn mass(&self, k: usize) -> f64 {
        if k < self.first || k > self.last {
            0.0
        } else {
            self.mass_by_k[k - self.first]
        }
    }
}

fn poisson_window(a: f64) -> PoissonWindow {
    debug_assert!(a > 0.0);
    if a < 600.0 {
        // Direct recurrence from k = 0.
        let mut mass = Vec::new();
        let mut w = (-a).exp();
        let mut cum = 0.0;
        let mut k = 0usize;
        loop {
            mass.push(w);
            cum += w;
            if 1.0 - cum < UNIF_TAIL && k as f64 > a {
                break;
            }
            k += 1;
            w *= a / k as f64;
        }
        PoissonWindow {
            first: 0,
            last: k,
            mass_by_k: mass,
        }
    } else {
        let sd = a.sqrt();
        let first = ((a - 9.0 * sd).floor().max(0.0)) as usize;
        let last = (a + 9.0 * sd).ceil() as usize;
        let ln_a = a.ln();
        let mass_by_k: Vec<f64> = (first..=last)
            .map(|k| {
                let kf = k as f64;
                (kf * ln_a - a - statrs::function::gamma::ln_gamma(kf + 1.0)).exp()
            })
            .collect();
        PoissonWindow {
            first,
            last,
            mass_by_k,
        }
    }
}

/// Spectral series for the absorbing semigroup: after one dense
/// eigendecomposition of the symmetrised absorbing block, every survival
/// evaluation is a short exponential sum.
pub struct SurvivalSeries {
    complement: Vec<usize>,
    index_of: Vec<usize>,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    /// `b_j = sum_sigma Q[sigma, j] sqrt(pi(sigma))`.
    weights: Vec<f64>,
    sqrt_pi: Vec<f64>,
}

impl SurvivalSeries {
    pub fn build(gen: &Generator, target: &StateSet) -> Result<Self> {
        target.validate_target()?;
        let n = gen.n();
        let complement: Vec<usize> = target.iter_complement().collect();
        let m = complement.len();
        if m > SERIES_CAP {
            return Err(Error::LengthCap {
                op: "absorbing spectral series",
                cap: SERIES_CAP,
                len: m,
            });
        }
        let mut index_of = vec![usize::MAX; n];
        for (k, &id) in complement.iter().enumerate() {
            index_of[id] = k;
        }
        let mut s = DMatrix::<f64>::zeros(m, m);
        let off = -(gen.params().p() * gen.params().q()).sqrt();
        gen.for_each_edge(|a, c, _| {
            if index_of[a] != usize::MAX && index_of[c] != usize::MAX {
                s[(index_of[a], index_of[c])] = off;
            }
        });
        for (k, &id) in complement.iter().enumerate() {
            s[(k, k)] = gen.holding(id);
        }
        let (values, vectors) = linalg::dense_sorted_eigen(s);
        let sqrt_pi: Vec<f64> = complement.iter().map(|&id| gen.sqrt_pi()[id]).collect();
        let weights: Vec<f64> = (0..m)
            .map(|j| (0..m).map(|r| vectors[(r, j)] * sqrt_pi[r]).sum())
            .collect();
        Ok(Self {
            complement,
            index_of,
            values,
            vectors,
            weights,
            sqrt_pi,
        })
    }

    /// Smallest eigenvalue of the absorbing block; `1 / lambda_min` bounds
    /// every mean hitting time from inside the complement.
    pub fn slowest_rate(&self) -> f64 {
        self.values[0]
    }

    pub fn eval(&self, start: Configuration, t: f64) -> f64 {
        let idx = self.index_of[start.id()];
        if idx == usize::MAX {
            return 0.0;
        }
        if t <= 0.0 {
            return 1.0;
        }
        let mut acc = 0.0;
        for j in 0..self.values.len() {
            acc += self.vectors[(idx, j)] * self.weights[j] * (-self.values[j] * t).exp();
        }
        (acc / self.sqrt_pi[idx]).clamp(0.0, 1.0)
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }
}

/// `P_start(tau_target > t)`, dispatching between the uniformised and the
/// spectral route on the expected series length.
pub fn survival(gen: &Generator, start: Configuration, target: &StateSet, t: f64) -> Result<f64> {
    target.validate_target()?;
    if target.contains(start.id()) {
        return Ok(0.0);
    }
    let rate = target
        .iter_complement()
        .map(|id| gen.holding(id))
        .fold(0.0f64, f64::max)
        + 1.0;
    if rate * t <= UNIF_SWITCH {
        Ok(survival_uniformised(gen, start, target, t)?.0)
    } else {
        let series = SurvivalSeries::build(gen, target)?;
        Ok(series.eval(start, t))
    }
}

/// Smallest `t` with `f(t) <= level` for a continuous non-increasing `f`,
/// found by bracket doubling plus bisection to relative width `rel_tol`.
pub fn bisect_level(
    f: impl Fn(f64) -> f64,
    level: f64,
    hi_guess: f64,
    rel_tol: f64,
) -> Result<f64> {
    debug_assert!(hi_guess > 0.0);
    let mut lo = 0.0f64;
    let mut hi = hi_guess;
    let mut widened = 0;
    while f(hi) > level {
        lo = hi;
        hi *= 10.0;
        widened += 1;
        if widened > 60 {
            return Err(Error::BracketFailure {
                lo,
                hi,
                level,
            });
        }
    }
    for _ in 0..200 {
        if (hi - lo) <= rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Time at which the survival probability of the canonical hitting time
/// (start `1...10`, target `{eta_L = 1}`) crosses `level`.
pub fn quantile_time(gen: &Generator, level: f64, mean_hint: f64) -> Result<Solved> {
    let l = gen.len();
    let target = StateSet::spin_is(l, l, 1);
    let start = Configuration::single_right_vacancy(l);
    let series = SurvivalSeries::build(gen, &target)?;
    let t = bisect_level(
        |t| series.eval(start, t),
        level,
        (100.0 * mean_hint).max(1.0),
        1e-8,
    )?;
    let residual = (series.eval(start, t) - level).abs();
    Ok(Solved::new(t, "bisection", residual))
}

/// Worst-start total variation mixing time at the given threshold.
pub fn mixing_time(
    gen: &Generator,
    spectral: &FullSpectral,
    threshold: f64,
    trel_hint: f64,
) -> Result<Solved> {
    let pi_min = gen.pi().iter().fold(f64::MAX, |a, &b| a.min(b));
    // Standard reversible upper bound seeds the bracket.
    let hi = trel_hint * (1.0 + 0.5 * (1.0 / pi_min).ln());
    let t = bisect_level(
        |t| spectral.worst_tv(t, gen.pi()),
        threshold,
        hi.max(1.0),
        1e-6,
    )?;
    let residual = (spectral.worst_tv(t, gen.pi()) - threshold).abs();
    Ok(Solved::new(t, "bisection", residual))
}
