//! Variational lower bound on the relaxation time through the bottleneck
//! ratio of a set: stationary mass on each side over the rate of escaping
//! mass, evaluated with two independently coded escape sums.

use crate::error::{Error, Result};
use crate::exact::{indicator_dirichlet, Generator, StateSet};
use crate::model::{transitions, weight, Configuration};
use crate::Params;
use serde::Serialize;

/// Bottleneck ratio of a set together with its ingredients.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BottleneckBound {
    /// `pi(A) pi(A^c) / D(1_A)`, a lower bound on the relaxation time
    pub ratio: f64,
    /// stationary mass of the set
    pub mass: f64,
    /// escape sum over boundary members and their leaving transitions
    pub escape: f64,
    /// the same form summed over generator edges
    pub crosscheck: f64,
}

/// Evaluates the bottleneck ratio of `set`. The escape rate is accumulated
/// per boundary member from the model's transition list and cross-checked
/// against the edge sum of the assembled generator.
pub fn bottleneck_lower_bound(params: &Params, set: &StateSet) -> Result<BottleneckBound> {
    let l = params.len();
    if set.space() != 1usize << l {
        return Err(Error::StateOutOfRange {
            id: set.space(),
            space: 1usize << l,
        });
    }
    if set.is_empty() || set.count() == set.space() {
        return Err(Error::BadTarget {
            what: "bottleneck set must be proper and nonempty",
        });
    }
    let mut mass = 0.0;
    let mut escape = 0.0;
    for id in set.iter() {
        let cfg = Configuration::from_id(id, l).expect("id within state space");
        let w = weight(cfg, params);
        mass += w;
        for tr in transitions(cfg, params) {
            if !set.contains(tr.to.id()) {
                escape += w * tr.rate;
            }
        }
    }
    let gen = Generator::build(params)?;
    let crosscheck = indicator_dirichlet(&gen, set);
    Ok(BottleneckBound {
        ratio: mass * (1.0 - mass) / escape,
        mass,
        escape,
        crosscheck,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bottleneck::boundary::AstarMembers;
    use crate::bottleneck::reach::reachable_set;
    use crate::exact::relaxation_time;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(params: &Params, set: &StateSet, trel: f64) {
        let bound = bottleneck_lower_bound(params, set).unwrap();
        assert!(
            (bound.escape - bound.crosscheck).abs() <= 1e-12 * bound.escape.max(1e-3),
            "escape routes disagree: {} vs {}",
            bound.escape,
            bound.crosscheck
        );
        assert!(
            bound.ratio <= trel * (1.0 + 1e-9),
            "L={} q={}: ratio {} above relaxation time {}",
            params.len(),
            params.q(),
            bound.ratio,
            trel
        );
    }

    #[test]
    fn collapse_set_bound_stays_below_relaxation() {
        for l in 1..=8usize {
            let set = AstarMembers::build(l).unwrap().as_state_set();
            for q in [0.05, 0.2, 0.4] {
                let params = Params::new(l, q).unwrap();
                let trel = relaxation_time(&params).unwrap().value;
                check(&params, &set, trel);
            }
        }
    }

    #[test]
    fn budgeted_closure_bound_stays_below_relaxation() {
        for (n, l) in [(2usize, 5usize), (3, 8)] {
            let reach =
                reachable_set(Configuration::single_right_vacancy(l), n + 1).unwrap();
            for q in [0.1, 0.3] {
                let params = Params::new(l, q).unwrap();
                let trel = relaxation_time(&params).unwrap().value;
                check(&params, reach.members(), trel);
            }
        }
    }

    #[test]
    fn random_sets_bound_stays_below_relaxation() {
        let l = 6usize;
        let params = Params::new(l, 0.2).unwrap();
        let trel = relaxation_time(&params).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eedb011);
        let mut done = 0;
        while done < 50 {
            let mut set = StateSet::empty(1 << l);
            for id in 0..1usize << l {
                if rng.gen::<bool>() {
                    set.insert(id);
                }
            }
            if set.is_empty() || set.count() == set.space() {
                continue;
            }
            let mass: f64 = set
                .iter()
                .map(|id| weight(Configuration::from_id(id, l).unwrap(), &params))
                .sum();
            let set = if mass > 0.5 { set.complement() } else { set };
            if set.is_empty() {
                continue;
            }
            check(&params, &set, trel);
            done += 1;
        }
    }

    #[test]
    fn degenerate_sets_rejected() {
        let params = Params::new(4, 0.2).unwrap();
        let empty = StateSet::empty(16);
        assert!(matches!(
            bottleneck_lower_bound(&params, &empty),
            Err(Error::BadTarget { .. })
        ));
        let full = empty.complement();
        assert!(matches!(
            bottleneck_lower_bound(&params, &full),
            Err(Error::BadTarget { .. })
        ));
        let mismatched = StateSet::singleton(8, 1);
        assert!(bottleneck_lower_bound(&params, &mismatched).is_err());
    }
}
