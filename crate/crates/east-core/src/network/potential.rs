//! Harmonic potentials between disjoint state sets.

use crate::error::{Error, Result};
use crate::exact::{dirichlet_form, solve_absorbing, StateSet};
use crate::Params;

use super::Network;

/// The voltage profile between a source set held at one and a sink set held
/// at zero: off the boundary the values are harmonic for the generator, and
/// entrywise they are the probabilities of reaching the source before the
/// sink. Among all functions with these boundary values the profile
/// minimises the Dirichlet form, and that minimum is the capacity of the
/// pair.
#[derive(Clone, Debug)]
pub struct HarmonicPotential {
    /// Value per state id.
    pub values: Vec<f64>,
    /// Largest absolute generator residual over interior states.
    pub residual: f64,
    /// Dirichlet form of the profile.
    pub dirichlet: f64,
}

pub fn harmonic_potential(params: &Params, a: &StateSet, b: &StateSet) -> Result<HarmonicPotential> {
    let net = Network::build(params)?;
    harmonic_of(&net, a, b)
}

pub(super) fn validate_pair(net: &Network, a: &StateSet, b: &StateSet) -> Result<()> {
    let n = net.n();
    if a.space() != n || b.space() != n {
        return Err(Error::InvalidArgument(
            "source and sink sets live on a different chain".into(),
        ));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::BadTarget { what: "empty" });
    }
    if a.intersects(b) {
        return Err(Error::InvalidArgument(
            "source and sink sets overlap".into(),
        ));
    }
    Ok(())
}

pub(super) fn harmonic_of(net: &Network, a: &StateSet, b: &StateSet) -> Result<HarmonicPotential> {
    validate_pair(net, a, b)?;
    let gen = net.generator();
    let n = gen.n();

    let mut boundary = StateSet::empty(n);
    for id in a.iter().chain(b.iter()) {
        boundary.insert(id);
    }

    let mut values = if boundary.count() == n {
        // no interior: the boundary data is the whole profile
        vec![0.0; n]
    } else {
        // off the boundary (-G) f = (rate into the source set), the
        // absorbed column of the generator
        let mut rhs = vec![0.0; n];
        for (id, slot) in rhs.iter_mut().enumerate() {
            if boundary.contains(id) {
                continue;
            }
            let mut legal = gen.legal_sites(id);
            while let Some(site) = legal.next_site() {
                if a.contains(id ^ (1usize << (site - 1))) {
                    *slot += gen.rate(id, site);
                }
            }
        }
        solve_absorbing(gen, &boundary, &rhs)?.0
    };
    for id in a.iter() {
        values[id] = 1.0;
    }

    // re-derive the harmonicity defect directly from the rates
    let mut residual = 0.0f64;
    for id in boundary.iter_complement() {
        let mut generator_row = 0.0;
        let mut legal = gen.legal_sites(id);
        while let Some(site) = legal.next_site() {
            let flipped = id ^ (1usize << (site - 1));
            generator_row += gen.rate(id, site) * (values[flipped] - values[id]);
        }
        residual = residual.max(generator_row.abs());
    }
    if residual > 1e-10 {
        return Err(Error::SolverStalled {
            solver: "harmonic potential",
            residual,
            iterations: 0,
        });
    }

    let dirichlet = dirichlet_form(gen, &values);
    Ok(HarmonicPotential {
        values,
        residual,
        dirichlet,
    })
}

#[cfg(test)]
mod tests {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::exact::{indicator_dirichlet, Generator};
    use crate::network::fixtures;
    use crate::network::{b_ell, Network};

    #[test]
    fn single_site_profile_is_the_indicator() {
        let params = Params::new(1, 0.3).unwrap();
        let a = StateSet::singleton(2, 0);
        let b = StateSet::singleton(2, 1);
        let pot = harmonic_potential(&params, &a, &b).unwrap();
        assert_eq!(pot.values, vec![1.0, 0.0]);
        assert_eq!(pot.residual, 0.0);
        assert!((pot.dirichlet - 0.21).abs() < 1e-15);
    }

    #[test]
    fn profiles_are_probabilities_with_tiny_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(l, q) in &[(3usize, 0.05f64), (5, 0.2), (6, 0.4)] {
            let params = Params::new_wide(l, q).unwrap();
            let net = Network::build(&params).unwrap();
            for _ in 0..8 {
                let (a, b) = fixtures::random_disjoint_sets(net.n(), &mut rng);
                let pot = harmonic_of(&net, &a, &b).unwrap();
                assert!(pot.residual < 1e-10);
                for id in 0..net.n() {
                    assert!(pot.values[id] >= -1e-12 && pot.values[id] <= 1.0 + 1e-12);
                    if a.contains(id) {
                        assert_eq!(pot.values[id], 1.0);
                    }
                    if b.contains(id) {
                        assert_eq!(pot.values[id], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn profile_minimises_the_dirichlet_form() {
        let params = Params::new(4, 0.2).unwrap();
        let net = Network::build(&params).unwrap();
        let gen = Generator::build(&params).unwrap();
        let a = StateSet::singleton(16, 15);
        let b = b_ell(4, 4).unwrap();
        let pot = harmonic_of(&net, &a, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let g: Vec<f64> = (0..16)
                .map(|id| {
                    if a.contains(id) {
                        1.0
                    } else if b.contains(id) {
                        0.0
                    } else {
                        rng.gen_range(-0.5..1.5)
                    }
                })
                .collect();
            assert!(pot.dirichlet <= dirichlet_form(&gen, &g) + 1e-12);
        }
    }

    #[test]
    fn covering_boundary_leaves_the_indicator() {
        let params = Params::new(2, 0.3).unwrap();
        let net = Network::build(&params).unwrap();
        let gen = Generator::build(&params).unwrap();
        let a = StateSet::from_ids(4, [0, 3]);
        let b = a.complement();
        let pot = harmonic_of(&net, &a, &b).unwrap();
        assert_eq!(pot.values, vec![1.0, 0.0, 0.0, 1.0]);
        let ind: Vec<f64> = (0..4).map(|id| f64::from(a.contains(id) as u8)).collect();
        assert!((pot.dirichlet - dirichlet_form(&gen, &ind)).abs() < 1e-15);
        assert!((pot.dirichlet - indicator_dirichlet(&gen, &a)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        let params = Params::new(3, 0.2).unwrap();
        let a = StateSet::from_ids(8, [1, 2]);
        let overlapping = StateSet::from_ids(8, [2, 5]);
        assert!(harmonic_potential(&params, &a, &overlapping).is_err());
        let empty = StateSet::empty(8);
        assert!(matches!(
            harmonic_potential(&params, &a, &empty),
            Err(Error::BadTarget { what: "empty" })
        ));
        let elsewhere = StateSet::singleton(16, 3);
        assert!(harmonic_potential(&params, &a, &elsewhere).is_err());
    }
}
