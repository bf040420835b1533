//! Per-site ring clocks and coins.
//!
//! Each site owns an independent generator keyed by `(seed, site)`, so a
//! stream can be extended past any horizon without touching, or replaying,
//! the others. Extending and then reading gives byte-identical prefixes to
//! sampling with the larger horizon up front.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Params;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// An independent generator for stream `tag` of the master `seed`. Sites use
/// their own index as the tag; auxiliary streams use tags far above any
/// admissible chain length.
pub(crate) fn stream_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut s = seed ^ tag.wrapping_mul(0xd1342543de82ef95);
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

struct SiteStream {
    rng: ChaCha8Rng,
    rings: Vec<f64>,
    coins: Vec<bool>,
    /// Time of the last materialized ring.
    frontier: f64,
}

impl SiteStream {
    fn new(seed: u64, site: usize) -> Self {
        Self {
            rng: stream_rng(seed, site as u64),
            rings: Vec::new(),
            coins: Vec::new(),
            frontier: 0.0,
        }
    }

    fn extend_to(&mut self, horizon: f64, p: f64) {
        while self.frontier <= horizon {
            let u: f64 = self.rng.gen();
            self.frontier += -(1.0 - u).ln();
            self.rings.push(self.frontier);
            self.coins.push(self.rng.gen::<f64>() < p);
        }
    }
}

/// Materialized rings and coins for every site of one chain.
pub struct NoiseField {
    seed: u64,
    p: f64,
    horizon: f64,
    sites: Vec<SiteStream>,
}

impl NoiseField {
    /// Streams for sites `1..=L` covering `[0, horizon]`.
    pub fn sample(params: &Params, horizon: f64, seed: u64) -> Self {
        let mut field = Self {
            seed,
            p: params.p(),
            horizon: 0.0,
            sites: (1..=params.len()).map(|x| SiteStream::new(seed, x)).collect(),
        };
        field.extend_to(horizon);
        field
    }

    /// Materialize every stream past `horizon`. No-op when already covered.
    pub fn extend_to(&mut self, horizon: f64) {
        if horizon > self.horizon {
            self.horizon = horizon;
        }
        for s in &mut self.sites {
            s.extend_to(self.horizon, self.p);
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn rings(&self, site: usize) -> &[f64] {
        &self.sites[site - 1].rings
    }

    pub fn coins(&self, site: usize) -> &[bool] {
        &self.sites[site - 1].coins
    }

    /// The streams of sites `first..first + len`, re-indexed to `1..=len`.
    /// The clone keeps the generator states, so extending the window stays
    /// consistent with extending the parent.
    pub fn window(&self, first: usize, len: usize) -> NoiseField {
        assert!(first >= 1 && first + len - 1 <= self.len());
        NoiseField {
            seed: self.seed,
            p: self.p,
            horizon: self.horizon,
            sites: self.sites[first - 1..first - 1 + len]
                .iter()
                .map(|s| SiteStream {
                    rng: s.rng.clone(),
                    rings: s.rings.clone(),
                    coins: s.coins.clone(),
                    frontier: s.frontier,
                })
                .collect(),
        }
    }

    /// All rings with `time <= horizon`, sorted by `(time, site)`.
    pub fn merged(&mut self, horizon: f64) -> Vec<Ring> {
        self.extend_to(horizon);
        let mut out = Vec::new();
        for site in 1..=self.len() {
            let s = &self.sites[site - 1];
            for (k, &t) in s.rings.iter().enumerate() {
                if t <= horizon {
                    out.push(Ring {
                        time: t,
                        site,
                        coin: s.coins[k],
                    });
                }
            }
        }
        out.sort_unstable_by(|a, b| {
            a.time
                .total_cmp(&b.time)
                .then_with(|| a.site.cmp(&b.site))
        });
        out
    }
}

/// One clock ring together with its coin.
#[derive(Debug, Clone, Copy)]
pub struct Ring {
    pub time: f64,
    pub site: usize,
    pub coin: bool,
}
