//! The chain as an electrical network: each admissible transition is an
//! edge whose conductance is the stationary weight times the jump rate, the
//! same number from either endpoint by reversibility. On top of that graph
//! live capacities between disjoint state sets (escape mass through the
//! embedded jump chain), harmonic potentials (whose Dirichlet form recovers
//! the capacity), equilibrium unit flows (whose energy recovers the
//! effective resistance), the mean-hitting-time identity that trades a
//! hitting time for a capacity, and the doubling construction that glues
//! equilibrium flows of one length into a certified unit flow at the next.

mod capacity;
mod equilibrium;
mod flow;
mod identity;
mod net;
mod potential;
mod resit;

pub use capacity::{capacity, effective_resistance, Capacity};
pub use equilibrium::equilibrium_flow;
pub use flow::{flow_energy, Flow};
pub use identity::{hitting_capacity_identity, IdentityCheck};
pub use net::{b_ell, c_ell, Network};
pub use potential::{harmonic_potential, HarmonicPotential};
pub use resit::{resit_construction, ResitCertificate};

/// Caps on network solves.
pub mod caps {
    /// Largest chain length for which a network is assembled; keeps every
    /// jump-chain and absorbing solve inside dense elimination sizes.
    pub const NETWORK: usize = 11;
    /// Largest ambient length accepted by the doubling flow construction.
    pub const RESIT: usize = 10;
}

#[cfg(test)]
pub(crate) mod fixtures {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::Flow;
    use crate::exact::{Generator, StateSet};

    /// Two nonempty disjoint random sets that do not exhaust the space.
    pub fn random_disjoint_sets(space: usize, rng: &mut ChaCha8Rng) -> (StateSet, StateSet) {
        loop {
            let mut a = StateSet::empty(space);
            let mut b = StateSet::empty(space);
            for id in 0..space {
                match rng.gen_range(0..5) {
                    0 => a.insert(id),
                    1 => b.insert(id),
                    _ => {}
                }
            }
            if !a.is_empty() && !b.is_empty() && a.count() + b.count() < space {
                return (a, b);
            }
        }
    }

    /// Unit flow from `a` to `b` superposing `paths` random simple paths,
    /// each found by a backtracking walk over the transition graph.
    pub fn random_path_flow(
        gen: &Generator,
        a: &StateSet,
        b: &StateSet,
        paths: usize,
        rng: &mut ChaCha8Rng,
    ) -> Flow {
        let sources: Vec<usize> = a.iter().collect();
        let mut flow = Flow::new(gen.len());
        let weight = 1.0 / paths as f64;
        for _ in 0..paths {
            let start = *sources.choose(rng).unwrap();
            let path = random_simple_path(gen, start, b, rng);
            for w in path.windows(2) {
                flow.add(w[0], w[1], weight).unwrap();
            }
        }
        flow
    }

    fn random_simple_path(
        gen: &Generator,
        start: usize,
        b: &StateSet,
        rng: &mut ChaCha8Rng,
    ) -> Vec<usize> {
        let mut visited = vec![false; gen.n()];
        let mut path = vec![start];
        visited[start] = true;
        'grow: while !b.contains(*path.last().unwrap()) {
            let here = *path.last().unwrap();
            let mut sites: Vec<usize> = Vec::new();
            let mut legal = gen.legal_sites(here);
            while let Some(site) = legal.next_site() {
                sites.push(site);
            }
            sites.shuffle(rng);
            for site in sites {
                let next = here ^ (1usize << (site - 1));
                if !visited[next] {
                    visited[next] = true;
                    path.push(next);
                    continue 'grow;
                }
            }
            // dead end: backtrack, leaving the state marked so the walk
            // cannot cycle
            path.pop();
            assert!(!path.is_empty(), "sink unreachable from the start");
        }
        path
    }
}
