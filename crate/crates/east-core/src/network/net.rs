//! Conductances on the transition graph.

use crate::error::{Error, Result};
use crate::exact::{Generator, StateSet};
use crate::model::Configuration;
use crate::Params;

use super::caps;

/// Weighted graph of the chain at fixed parameters: the vertices are the
/// `2^L` configurations, the edges the admissible single flips, and each
/// edge carries the conductance `pi(from) * rate(from -> to)`. Reversibility
/// makes the conductance independent of the chosen endpoint; the resistance
/// of an edge is its reciprocal conductance.
pub struct Network {
    gen: Generator,
}

impl Network {
    pub fn build(params: &Params) -> Result<Self> {
        if params.len() > caps::NETWORK {
            return Err(Error::LengthCap {
                op: "network assembly",
                cap: caps::NETWORK,
                len: params.len(),
            });
        }
        Ok(Self {
            gen: Generator::build(params)?,
        })
    }

    pub fn params(&self) -> &Params {
        self.gen.params()
    }

    pub fn len(&self) -> usize {
        self.gen.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.gen.n()
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }

    /// Conductance of the edge leaving `from` through a flip at `site`,
    /// zero when the constraint blocks the flip.
    pub fn conductance(&self, from: usize, site: usize) -> f64 {
        self.gen.pi()[from] * self.gen.rate(from, site)
    }

    /// The flipped site joining two states, if they form an admissible edge.
    pub fn edge_site(&self, a: usize, b: usize) -> Result<usize> {
        let n = self.n();
        if a >= n || b >= n {
            return Err(Error::StateOutOfRange {
                id: a.max(b),
                space: n,
            });
        }
        let diff = a ^ b;
        if diff.count_ones() == 1 {
            let site = diff.trailing_zeros() as usize + 1;
            let cfg = Configuration::from_id(a, self.len())?;
            if cfg.constraint(site) {
                return Ok(site);
            }
        }
        Err(Error::InvalidArgument(format!(
            "states {a} and {b} are not joined by an admissible flip"
        )))
    }

    /// Conductance of the unoriented edge `{a, b}`.
    pub fn edge_conductance(&self, a: usize, b: usize) -> Result<f64> {
        let site = self.edge_site(a, b)?;
        Ok(self.conductance(a, site))
    }

    /// Visit every unoriented edge once as `(a, b, conductance)`, `a < b`.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        let pi = self.gen.pi();
        self.gen.for_each_edge(|from, to, rate| {
            if from < to {
                f(from, to, pi[from] * rate);
            }
        });
    }

    /// Largest relative mismatch between the conductance of an edge computed
    /// from its two endpoints.
    pub fn conductance_residual(&self) -> f64 {
        self.gen.reversibility_residual()
    }
}

fn site_set(len: usize, ell: usize, pred: impl Fn(Configuration) -> bool) -> Result<StateSet> {
    if len == 0 {
        return Err(Error::EmptyChain);
    }
    if len > caps::NETWORK {
        return Err(Error::LengthCap {
            op: "anchored set enumeration",
            cap: caps::NETWORK,
            len,
        });
    }
    if ell == 0 || ell > len {
        return Err(Error::SiteOutOfRange { site: ell, len });
    }
    Ok(StateSet::from_predicate(len, pred))
}

/// Configurations with a vacancy at `ell` and every site strictly to its
/// right occupied. These are the sink sets of the doubling construction:
/// starting from all ones, the chain must enter `b_ell(len, ell)` before it
/// can disturb anything right of `ell`.
pub fn b_ell(len: usize, ell: usize) -> Result<StateSet> {
    site_set(len, ell, |cfg| {
        cfg.is_vacant(ell) && (ell + 1..=len).all(|x| !cfg.is_vacant(x))
    })
}

/// Configurations with a vacancy at `ell` and every site strictly to its
/// left occupied: the states on which the shifted copy of a flow lives,
/// since the fixed vacancy unconstrains site `ell + 1`.
pub fn c_ell(len: usize, ell: usize) -> Result<StateSet> {
    site_set(len, ell, |cfg| {
        cfg.is_vacant(ell) && (1..ell).all(|x| !cfg.is_vacant(x))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conductance_agrees_from_both_endpoints() {
        for &(l, q) in &[(4usize, 0.05f64), (6, 0.3), (5, 0.45)] {
            let net = Network::build(&Params::new(l, q).unwrap()).unwrap();
            assert!(net.conductance_residual() < 1e-14, "L={l} q={q}");
        }
    }

    #[test]
    fn unoriented_edges_halve_the_directed_count() {
        let net = Network::build(&Params::new(5, 0.2).unwrap()).unwrap();
        let mut unoriented = 0usize;
        let mut directed = 0usize;
        net.for_each_edge(|a, b, c| {
            assert!(a < b);
            assert!(c > 0.0);
            unoriented += 1;
        });
        net.generator().for_each_edge(|_, _, _| directed += 1);
        assert_eq!(2 * unoriented, directed);
        // site 1 contributes 2^(L-1) edges, each site x > 1 half as many
        assert_eq!(unoriented, 16 + 4 * 8);
    }

    #[test]
    fn edge_conductance_validates_the_pair() {
        let net = Network::build(&Params::new(2, 0.3).unwrap()).unwrap();
        // id 1 holds spin 1 at site 1, so site 2 is blocked
        assert!(net.edge_conductance(1, 3).is_err());
        // two sites differ
        assert!(net.edge_conductance(0, 3).is_err());
        assert!(matches!(
            net.edge_conductance(1, 4),
            Err(Error::StateOutOfRange { .. })
        ));
        // id 0 is the empty chain; filling site 1 is the p move
        let c = net.edge_conductance(0, 1).unwrap();
        assert!((c - 0.3 * 0.3 * 0.7).abs() < 1e-15);
        let same = net.edge_conductance(1, 0).unwrap();
        assert!((c - same).abs() < 1e-16);
    }

    #[test]
    fn anchored_sets_have_the_advertised_members() {
        for ell in 1..=5usize {
            assert_eq!(b_ell(5, ell).unwrap().count(), 1 << (ell - 1));
            assert_eq!(c_ell(5, ell).unwrap().count(), 1 << (5 - ell));
        }
        // vacancy at 3, ones right of it, sites 1..2 free
        let b = b_ell(5, 3).unwrap();
        assert!(b.contains(0b11011));
        assert!(b.contains(0b11000));
        assert!(!b.contains(0b01011));
        // vacancy at 3, ones left of it, sites 4..5 free
        let c = c_ell(5, 3).unwrap();
        let ids: Vec<usize> = c.iter().collect();
        assert_eq!(ids, vec![3, 11, 19, 27]);
    }

    #[test]
    fn anchored_sets_reject_bad_sites_and_lengths() {
        assert!(matches!(b_ell(0, 1), Err(Error::EmptyChain)));
        assert!(matches!(
            b_ell(4, 0),
            Err(Error::SiteOutOfRange { site: 0, len: 4 })
        ));
        assert!(matches!(c_ell(4, 5), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(b_ell(12, 3), Err(Error::LengthCap { .. })));
    }

    #[test]
    fn network_respects_the_length_cap() {
        assert!(matches!(
            Network::build(&Params::new(12, 0.2).unwrap()),
            Err(Error::LengthCap { .. })
        ));
    }
}
