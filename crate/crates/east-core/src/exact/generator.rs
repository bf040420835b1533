//! The Markov generator on the full state space, kept matrix-free.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SymOp;
use crate::model::Configuration;
use crate::Params;

use super::caps;

/// Generator of the chain at fixed parameters. Stores only the stationary
/// vector and the holding rates; adjacency is recomputed from bit masks on
/// the fly, so matrix-vector products never materialise the matrix.
///
/// The symmetrised form `S = D^{1/2} (-G) D^{-1/2}` (with `D = diag(pi)`) has
/// a particularly simple structure here: every off-diagonal entry on an
/// admissible edge equals `-sqrt(p q)` because the two directed rates of an
/// edge are always `p` and `q`.
pub struct Generator {
    params: Params,
    pi: Vec<f64>,
    sqrt_pi: Vec<f64>,
    holding: Vec<f64>,
    off_diag: f64,
}

impl Generator {
    pub fn build(params: &Params) -> Result<Self> {
        let l = params.len();
        if l > caps::GENERATOR {
            return Err(Error::LengthCap {
                op: "generator assembly",
                cap: caps::GENERATOR,
                len: l,
            });
        }
        let n = params.state_count();
        let (q, p) = (params.q(), params.p());

        // pi(state) = q^zeros p^ones, tabulated through the vacancy count.
        let mut pow_q = vec![1.0; l + 1];
        let mut pow_p = vec![1.0; l + 1];
        for k in 1..=l {
            pow_q[k] = pow_q[k - 1] * q;
            pow_p[k] = pow_p[k - 1] * p;
        }

        let pi: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|id| {
                let zeros = l - (id as u32).count_ones() as usize;
                pow_q[zeros] * pow_p[l - zeros]
            })
            .collect();
        let sqrt_pi: Vec<f64> = pi.par_iter().map(|w| w.sqrt()).collect();
        let holding: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|id| holding_rate(id as u32, l, q, p))
            .collect();

        Ok(Self {
            params: *params,
            pi,
            sqrt_pi,
            holding,
            off_diag: (p * q).sqrt(),
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn sqrt_pi(&self) -> &[f64] {
        &self.sqrt_pi
    }

    /// Total exit rate out of a state.
    pub fn holding(&self, id: usize) -> f64 {
        self.holding[id]
    }

    /// Rate of the directed move `from -> from with site x flipped`, zero
    /// when the constraint blocks the move.
    pub fn rate(&self, from: usize, site: usize) -> f64 {
        let cfg = Configuration::from_id(from, self.len()).expect("state id in range");
        if !cfg.constraint(site) {
            return 0.0;
        }
        if cfg.spin(site) == 1 {
            self.params.q()
        } else {
            self.params.p()
        }
    }

    /// Sites whose constraint is satisfied in state `id`: site 1 plus every
    /// site directly right of a vacancy.
    pub fn legal_sites(&self, id: usize) -> LegalSites {
        LegalSites {
            // Bit x-1 set means site x is legal: site 1 always, site j+2 for
            // every vacancy at site j+1 (zero bit j) with j+2 <= L.
            mask: 1 | (!(id as u32) << 1) & ((1u32 << self.len()) - 1),
        }
    }

    /// Visit every directed transition `(from, to, rate)`.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        let (q, p) = (self.params.q(), self.params.p());
        for id in 0..self.n() {
            let mut legal = self.legal_sites(id);
            while let Some(site) = legal.next_site() {
                let bit = 1usize << (site - 1);
                let rate = if id & bit != 0 { q } else { p };
                f(id, id ^ bit, rate);
            }
        }
    }

    /// Largest violation of detailed balance `pi(a) K(a,b) = pi(b) K(b,a)`
    /// over all directed edges, relative to the edge conductance scale.
    pub fn reversibility_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        self.for_each_edge(|a, b, rate| {
            let site = ((a ^ b) as u32).trailing_zeros() as usize + 1;
            let forward = self.pi[a] * rate;
            let backward = self.pi[b] * self.rate(b, site);
            let scale = forward.abs().max(backward.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max((forward - backward).abs() / scale);
        });
        worst
    }

    /// Dense generator matrix `G` with `G[a, b] = K(a, b)` off the diagonal.
    pub fn dense_generator(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::<f64>::zeros(n, n);
        self.for_each_edge(|a, b, rate| {
            m[(a, b)] += rate;
            m[(a, a)] -= rate;
        });
        m
    }

    /// Dense `S = D^{1/2} (-G) D^{-1/2}`, symmetric positive semidefinite
    /// with kernel spanned by `sqrt(pi)`.
    pub fn dense_symmetrised(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::<f64>::zeros(n, n);
        self.for_each_edge(|a, b, _| {
            m[(a, b)] = -self.off_diag;
        });
        for a in 0..n {
            m[(a, a)] = self.holding[a];
        }
        m
    }

    /// Unit vector spanning the kernel of the symmetrised generator.
    pub fn kernel_vector(&self) -> Vec<f64> {
        let norm: f64 = self.pi.iter().sum::<f64>().sqrt();
        self.sqrt_pi.iter().map(|s| s / norm).collect()
    }

    /// Matrix-free `y = S x` on the full space.
    pub fn sym_apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n();
        let off = self.off_diag;
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        y.par_iter_mut().enumerate().for_each(|(id, out)| {
            let mut acc = self.holding[id] * x[id];
            let mut legal = LegalSites {
                mask: 1 | (!(id as u32) << 1) & ((1u32 << self.params.len()) - 1),
            };
            while let Some(site) = legal.next_site() {
                acc -= off * x[id ^ (1usize << (site - 1))];
            }
            *out = acc;
        });
    }
}

/// Iterator over legal sites encoded in a bit mask.
pub struct LegalSites {
    mask: u32,
}

impl LegalSites {
    #[inline]
    pub fn next_site(&mut self) -> Option<usize> {
        if self.mask == 0 {
            return None;
        }
        let bit = self.mask.trailing_zeros();
        self.mask &= self.mask - 1;
        Some(bit as usize + 1)
    }
}

#[inline]
fn holding_rate(id: u32, l: usize, q: f64, p: f64) -> f64 {
    let mut legal = 1 | (!id << 1) & ((1u32 << l) - 1);
    let mut total = 0.0;
    while legal != 0 {
        let bit = legal & legal.wrapping_neg();
        total += if id & bit != 0 { q } else { p };
        legal &= legal - 1;
    }
    total
}

/// Symmetrised generator as a matrix-free operator for the iterative paths.
pub struct SymGenerator<'a>(pub &'a Generator);

impl SymOp for SymGenerator<'_> {
    fn dim(&self) -> usize {
        self.0.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.sym_apply(x, y);
    }
    fn diag(&self, i: usize) -> f64 {
        self.0.holding(i)
    }
}
