//! Equilibrium unit flows between state sets.

use crate::error::{Error, Result};
use crate::exact::StateSet;
use crate::Params;

use super::potential::harmonic_of;
use super::{Flow, Network};

/// The unit flow of least energy from `a` to `b`: conductance times the
/// potential drop on every edge, normalised by the total current. Its
/// energy is exactly the effective resistance of the pair, which makes it
/// the minimiser among all unit flows.
pub fn equilibrium_flow(params: &Params, a: &StateSet, b: &StateSet) -> Result<Flow> {
    let net = Network::build(params)?;
    equilibrium_of(&net, a, b)
}

pub(super) fn equilibrium_of(net: &Network, a: &StateSet, b: &StateSet) -> Result<Flow> {
    let potential = harmonic_of(net, a, b)?;
    let f = &potential.values;
    let mut raw = Flow::new(net.len());
    let mut failed = None;
    net.for_each_edge(|lo, hi, c| {
        let v = c * (f[lo] - f[hi]);
        if v != 0.0 {
            if let Err(e) = raw.add(lo, hi, v) {
                failed = Some(e);
            }
        }
    });
    if let Some(e) = failed {
        return Err(e);
    }
    let strength = raw.strength(a);
    if !strength.is_finite() || strength <= 0.0 {
        return Err(Error::InvalidArgument(
            "the capacity between the sets vanishes; no equilibrium flow".into(),
        ));
    }
    Ok(raw.scaled(1.0 / strength))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::exact::Generator;
    use crate::network::fixtures;
    use crate::network::{capacity, flow_energy};

    #[test]
    fn single_site_flow_is_the_lone_edge() {
        let params = Params::new(1, 0.3).unwrap();
        let a = StateSet::singleton(2, 0);
        let b = StateSet::singleton(2, 1);
        let net = Network::build(&params).unwrap();
        let flow = equilibrium_flow(&params, &a, &b).unwrap();
        let edges: Vec<_> = flow.iter().collect();
        assert_eq!(edges, vec![(0, 1, 1.0)]);
        let energy = flow_energy(&net, &flow).unwrap();
        assert!((energy - 1.0 / 0.21).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_flows_are_unit_and_divergence_free_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for &(l, q) in &[(4usize, 0.1f64), (5, 0.3), (6, 0.45)] {
            let net = Network::build(&Params::new_wide(l, q).unwrap()).unwrap();
            for _ in 0..6 {
                let (a, b) = fixtures::random_disjoint_sets(net.n(), &mut rng);
                let flow = equilibrium_of(&net, &a, &b).unwrap();
                assert!((flow.strength(&a) - 1.0).abs() < 1e-12);
                for (id, &d) in flow.divergences().iter().enumerate() {
                    if a.contains(id) {
                        assert!(d >= -1e-12);
                    } else if b.contains(id) {
                        assert!(d <= 1e-12);
                    } else {
                        assert!(d.abs() < 1e-12, "id={id} div={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn equilibrium_energy_is_the_effective_resistance() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for &(l, q) in &[(4usize, 0.15f64), (6, 0.3)] {
            let params = Params::new(l, q).unwrap();
            let net = Network::build(&params).unwrap();
            for _ in 0..6 {
                let (a, b) = fixtures::random_disjoint_sets(net.n(), &mut rng);
                let flow = equilibrium_of(&net, &a, &b).unwrap();
                let energy = flow_energy(&net, &flow).unwrap();
                let cap = capacity(&params, &a, &b).unwrap().value;
                assert!((energy - 1.0 / cap).abs() * cap < 1e-8, "L={l} q={q}");
            }
        }
    }

    #[test]
    fn no_unit_flow_undercuts_the_equilibrium_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let params = Params::new(5, 0.25).unwrap();
        let net = Network::build(&params).unwrap();
        let gen = Generator::build(&params).unwrap();
        for _ in 0..10 {
            let (a, b) = fixtures::random_disjoint_sets(net.n(), &mut rng);
            let best = flow_energy(&net, &equilibrium_of(&net, &a, &b).unwrap()).unwrap();
            for paths in [1usize, 3, 5] {
                let rival = fixtures::random_path_flow(&gen, &a, &b, paths, &mut rng);
                let energy = flow_energy(&net, &rival).unwrap();
                assert!(best <= energy * (1.0 + 1e-12));
            }
        }
    }
}
