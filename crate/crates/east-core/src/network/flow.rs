//! Antisymmetric edge functions and their energy.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exact::StateSet;

use super::Network;

/// A flow on the transition graph: an antisymmetric function on oriented
/// edges, stored once per unoriented edge with the sign fixed toward the
/// larger state id. Edges carrying exactly zero are not stored, so the
/// support is always `edge_count` entries.
///
/// The container is graph agnostic; admissibility of the edges is only
/// checked when an energy is computed against a [`Network`].
#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    len: usize,
    edges: BTreeMap<(usize, usize), f64>,
}

impl Flow {
    /// Zero flow on the chain of the given length.
    pub fn new(len: usize) -> Self {
        Self {
            len,
            edges: BTreeMap::new(),
        }
    }

    /// Chain length.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when no edge carries flow.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Number of states.
    pub fn space(&self) -> usize {
        1usize << self.len
    }

    /// Number of unoriented edges in the support.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn canonical(&self, from: usize, to: usize) -> Result<((usize, usize), f64)> {
        if from == to {
            return Err(Error::InvalidArgument(
                "flow edge endpoints coincide".into(),
            ));
        }
        let space = self.space();
        if from >= space || to >= space {
            return Err(Error::StateOutOfRange {
                id: from.max(to),
                space,
            });
        }
        if from < to {
            Ok(((from, to), 1.0))
        } else {
            Ok(((to, from), -1.0))
        }
    }

    /// Signed flow from `from` to `to`; zero off the support.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        match self.canonical(from, to) {
            Ok((key, sign)) => sign * self.edges.get(&key).copied().unwrap_or(0.0),
            Err(_) => 0.0,
        }
    }

    /// Overwrite the flow on one edge.
    pub fn set(&mut self, from: usize, to: usize, value: f64) -> Result<()> {
        let (key, sign) = self.canonical(from, to)?;
        if value == 0.0 {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, sign * value);
        }
        Ok(())
    }

    /// Add to the flow on one edge, dropping it if the sum cancels.
    pub fn add(&mut self, from: usize, to: usize, value: f64) -> Result<()> {
        let (key, sign) = self.canonical(from, to)?;
        let next = self.edges.get(&key).copied().unwrap_or(0.0) + sign * value;
        if next == 0.0 {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, next);
        }
        Ok(())
    }

    /// Support edges as `(a, b, value)` with `a < b` and the value signed
    /// from `a` to `b`, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(a, b), &v)| (a, b, v))
    }

    /// The flow scaled by a constant.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut edges = BTreeMap::new();
        for (&key, &v) in &self.edges {
            let scaled = factor * v;
            if scaled != 0.0 {
                edges.insert(key, scaled);
            }
        }
        Self {
            len: self.len,
            edges,
        }
    }

    /// Edgewise sum with another flow on the same chain.
    pub fn plus(&self, other: &Flow) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::InvalidArgument(
                "flows live on different chains".into(),
            ));
        }
        let mut out = self.clone();
        for (a, b, v) in other.iter() {
            out.add(a, b, v)?;
        }
        Ok(out)
    }

    /// Net flow out of one state.
    pub fn divergence(&self, state: usize) -> f64 {
        let mut div = 0.0;
        for (&(a, b), &v) in &self.edges {
            if a == state {
                div += v;
            } else if b == state {
                div -= v;
            }
        }
        div
    }

    /// Net flow out of every state, indexed by id.
    pub fn divergences(&self) -> Vec<f64> {
        let mut div = vec![0.0; self.space()];
        for (&(a, b), &v) in &self.edges {
            div[a] += v;
            div[b] -= v;
        }
        div
    }

    /// Total divergence over a set of states: the strength of the flow when
    /// the set holds its sources.
    pub fn strength(&self, sources: &StateSet) -> f64 {
        debug_assert_eq!(sources.space(), self.space());
        let div = self.divergences();
        sources.iter().map(|id| div[id]).sum()
    }

    /// One `from to value` line per support edge, oriented so every value
    /// prints positive, in order of the canonical keys.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (&(a, b), &v) in &self.edges {
            if v < 0.0 {
                writeln!(out, "{b} {a} {}", -v).unwrap();
            } else {
                writeln!(out, "{a} {b} {v}").unwrap();
            }
        }
        out
    }
}

/// Energy of a flow: the sum over support edges of `value^2 / conductance`.
/// Every support edge must be an admissible transition of the network.
pub fn flow_energy(net: &Network, flow: &Flow) -> Result<f64> {
    if net.len() != flow.len() {
        return Err(Error::InvalidArgument(
            "flow and network live on different chains".into(),
        ));
    }
    let mut energy = 0.0;
    for (a, b, v) in flow.iter() {
        energy += v * v / net.edge_conductance(a, b)?;
    }
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::exact::Generator;
    use crate::network::fixtures;
    use crate::network::{b_ell, Network};
    use crate::Params;

    #[test]
    fn storage_is_antisymmetric() {
        let mut flow = Flow::new(3);
        flow.set(5, 2, 0.75).unwrap();
        assert!((flow.get(5, 2) - 0.75).abs() < 1e-16);
        assert!((flow.get(2, 5) + 0.75).abs() < 1e-16);
        assert_eq!(flow.get(2, 4), 0.0);
        assert_eq!(flow.edge_count(), 1);
        flow.set(2, 5, 0.25).unwrap();
        assert!((flow.get(5, 2) + 0.25).abs() < 1e-16);
    }

    #[test]
    fn two_path_flow_balances_and_exports() {
        let mut flow = Flow::new(3);
        for w in [[7, 3], [3, 1]] {
            flow.add(w[0], w[1], 0.6).unwrap();
        }
        for w in [[7, 5], [5, 1]] {
            flow.add(w[0], w[1], 0.4).unwrap();
        }
        assert!((flow.divergence(7) - 1.0).abs() < 1e-15);
        assert!((flow.divergence(1) + 1.0).abs() < 1e-15);
        assert_eq!(flow.divergence(3), 0.0);
        assert_eq!(flow.divergence(5), 0.0);
        for (id, &d) in flow.divergences().iter().enumerate() {
            assert!((d - flow.divergence(id)).abs() < 1e-16);
        }
        let sources = StateSet::singleton(8, 7);
        assert!((flow.strength(&sources) - 1.0).abs() < 1e-15);
        assert_eq!(flow.export(), "3 1 0.6\n5 1 0.4\n7 3 0.6\n7 5 0.4\n");
    }

    #[test]
    fn cancelling_additions_drop_the_edge() {
        let mut flow = Flow::new(2);
        flow.add(0, 1, 0.5).unwrap();
        flow.add(1, 0, 0.5).unwrap();
        assert!(flow.is_empty());
        flow.set(0, 1, 1.5).unwrap();
        flow.set(0, 1, 0.0).unwrap();
        assert_eq!(flow.edge_count(), 0);
    }

    #[test]
    fn sums_and_scalings_are_edgewise() {
        let mut a = Flow::new(2);
        a.set(0, 1, 1.0).unwrap();
        a.set(1, 3, 0.5).unwrap();
        let mut b = Flow::new(2);
        b.set(1, 0, 1.0).unwrap();
        b.set(2, 3, 2.0).unwrap();
        let sum = a.plus(&b).unwrap();
        assert_eq!(sum.get(0, 1), 0.0);
        assert!((sum.get(1, 3) - 0.5).abs() < 1e-16);
        assert!((sum.get(2, 3) - 2.0).abs() < 1e-16);
        assert_eq!(sum.edge_count(), 2);
        let scaled = a.scaled(-2.0);
        assert!((scaled.get(0, 1) + 2.0).abs() < 1e-16);
        assert!(a.scaled(0.0).is_empty());
        assert!(a.plus(&Flow::new(3)).is_err());
    }

    #[test]
    fn endpoints_are_validated() {
        let mut flow = Flow::new(2);
        assert!(matches!(
            flow.set(1, 1, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            flow.set(1, 4, 1.0),
            Err(Error::StateOutOfRange { id: 4, space: 4 })
        ));
        assert_eq!(flow.get(1, 1), 0.0);
    }

    #[test]
    fn energy_of_the_single_edge_chain_is_the_resistance() {
        let params = Params::new(1, 0.3).unwrap();
        let net = Network::build(&params).unwrap();
        assert_eq!(flow_energy(&net, &Flow::new(1)).unwrap(), 0.0);
        let mut unit = Flow::new(1);
        unit.set(0, 1, 1.0).unwrap();
        let energy = flow_energy(&net, &unit).unwrap();
        assert!((energy - 1.0 / (0.3 * 0.7)).abs() < 1e-12);
        let blown = flow_energy(&net, &unit.scaled(2.5)).unwrap();
        assert!((blown - 6.25 * energy).abs() / blown < 1e-15);
    }

    #[test]
    fn energy_rejects_edges_outside_the_graph() {
        let net = Network::build(&Params::new(2, 0.3).unwrap()).unwrap();
        let mut blocked = Flow::new(2);
        // flipping site 2 next to an occupied site 1
        blocked.set(1, 3, 1.0).unwrap();
        assert!(flow_energy(&net, &blocked).is_err());
        let mut jump = Flow::new(2);
        jump.set(0, 3, 1.0).unwrap();
        assert!(flow_energy(&net, &jump).is_err());
        let wrong_chain = Flow::new(3);
        assert!(flow_energy(&net, &wrong_chain).is_err());
    }

    #[test]
    fn averaging_flows_never_beats_the_worst_energy() {
        let params = Params::new(5, 0.2).unwrap();
        let net = Network::build(&params).unwrap();
        let gen = Generator::build(&params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sources = StateSet::singleton(32, 31);
        let sinks = b_ell(5, 3).unwrap();
        let flows: Vec<Flow> = (0..4)
            .map(|_| fixtures::random_path_flow(&gen, &sources, &sinks, 3, &mut rng))
            .collect();
        let energies: Vec<f64> = flows
            .iter()
            .map(|f| flow_energy(&net, f).unwrap())
            .collect();
        let mut average = Flow::new(5);
        for f in &flows {
            average = average.plus(&f.scaled(0.25)).unwrap();
        }
        let avg_energy = flow_energy(&net, &average).unwrap();
        let worst = energies.iter().cloned().fold(0.0, f64::max);
        assert!(avg_energy <= worst * (1.0 + 1e-12));
        // pairwise: energy of a sum is at most twice the summed energies
        let pair = flows[0].plus(&flows[1]).unwrap();
        let pair_energy = flow_energy(&net, &pair).unwrap();
        assert!(pair_energy <= 2.0 * (energies[0] + energies[1]) * (1.0 + 1e-12));
    }

    #[test]
    fn disjoint_supports_add_energies_exactly() {
        let net = Network::build(&Params::new(2, 0.3).unwrap()).unwrap();
        let mut a = Flow::new(2);
        a.set(0, 1, 1.0).unwrap();
        let mut b = Flow::new(2);
        b.set(2, 3, 1.0).unwrap();
        let ea = flow_energy(&net, &a).unwrap();
        let eb = flow_energy(&net, &b).unwrap();
        let sum = flow_energy(&net, &a.plus(&b).unwrap()).unwrap();
        assert_eq!(sum, ea + eb);
    }
}
