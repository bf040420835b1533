//! The exchange of a mean hitting time for a capacity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{mean_hitting_time, StateSet};
use crate::model::Configuration;
use crate::Params;

use super::capacity::capacity_of;
use super::potential::harmonic_of;
use super::Network;

/// Both sides of the identity
/// `E_a[hit B] * cap(a, B) = sum over states off B of pi * P(hit a before B)`,
/// evaluated through unrelated linear systems: the hitting side through the
/// absorbing mean, the capacity side through escape probabilities and the
/// harmonic potential of the pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityCheck {
    /// Mean hitting time of the sink from the state.
    pub hitting: f64,
    /// Stationary mass of the potential divided by the capacity.
    pub capacity_route: f64,
    /// Relative disagreement.
    pub residual: f64,
}

pub fn hitting_capacity_identity(
    params: &Params,
    a: &Configuration,
    b: &StateSet,
) -> Result<IdentityCheck> {
    let net = Network::build(params)?;
    if b.space() != net.n() {
        return Err(Error::InvalidArgument(
            "sink set lives on a different chain".into(),
        ));
    }
    b.validate_target()?;
    if b.contains(a.id()) {
        return Err(Error::InvalidArgument(
            "start lies inside the sink set".into(),
        ));
    }
    let source = StateSet::singleton(net.n(), a.id());
    let cap = capacity_of(&net, &source, b)?;
    let potential = harmonic_of(&net, &source, b)?;
    let pi = net.generator().pi();
    let mass: f64 = b
        .iter_complement()
        .map(|id| pi[id] * potential.values[id])
        .sum();
    let capacity_route = mass / cap.value;
    let hitting = mean_hitting_time(params, *a, b)?.value;
    let residual = (hitting - capacity_route).abs() / hitting.abs().max(f64::MIN_POSITIVE);
    Ok(IdentityCheck {
        hitting,
        capacity_route,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Generator;

    #[test]
    fn single_site_identity_is_exact() {
        let params = Params::new(1, 0.3).unwrap();
        let a = Configuration::from_id(0, 1).unwrap();
        let b = StateSet::singleton(2, 1);
        let check = hitting_capacity_identity(&params, &a, &b).unwrap();
        assert!((check.hitting - 1.0 / 0.7).abs() < 1e-12);
        assert!((check.capacity_route - 1.0 / 0.7).abs() < 1e-12);
        assert!(check.residual < 1e-15);
    }

    #[test]
    fn identity_holds_from_the_right_vacancy_state() {
        for &q in &[0.05f64, 0.2, 0.4] {
            for l in 1..=8usize {
                let params = Params::new(l, q).unwrap();
                let a = Configuration::single_right_vacancy(l);
                let b = StateSet::spin_is(l, l, 1);
                let check = hitting_capacity_identity(&params, &a, &b).unwrap();
                assert!(check.residual < 1e-8, "L={l} q={q} res={}", check.residual);
            }
        }
    }

    #[test]
    fn escaping_to_everywhere_else_takes_one_holding_time() {
        for l in [2usize, 4, 6] {
            let params = Params::new(l, 0.3).unwrap();
            let gen = Generator::build(&params).unwrap();
            for a in [
                Configuration::all_ones(l),
                Configuration::single_right_vacancy(l),
                Configuration::from_id(2, l).unwrap(),
            ] {
                let b = StateSet::singleton(1 << l, a.id()).complement();
                let check = hitting_capacity_identity(&params, &a, &b).unwrap();
                let expected = 1.0 / gen.holding(a.id());
                assert!((check.hitting - expected).abs() / expected < 1e-10);
                assert!(check.residual < 1e-8);
            }
        }
    }

    #[test]
    fn start_inside_the_sink_is_rejected() {
        let params = Params::new(3, 0.2).unwrap();
        let a = Configuration::all_ones(3);
        let b = StateSet::spin_is(3, 1, 1);
        assert!(matches!(
            hitting_capacity_identity(&params, &a, &b),
            Err(Error::InvalidArgument(_))
        ));
    }
}
