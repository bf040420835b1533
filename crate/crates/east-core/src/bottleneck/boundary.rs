//! Membership table for the collapse set, its internal boundary with all
//! escape witnesses, and the escape-rate bookkeeping that decomposes the
//! indicator Dirichlet form by flip site and spin found there.

use super::caps;
use super::stages::in_astar;
use crate::error::{Error, Result};
use crate::exact::StateSet;
use crate::model::{weight, Configuration};
use crate::Params;
use rayon::prelude::*;
use serde::Serialize;

/// Bit table of collapse-set membership over the full state space.
pub struct AstarMembers {
    len: usize,
    members: Vec<bool>,
}

impl AstarMembers {
    pub fn build(l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::EmptyChain);
        }
        if l > caps::MEMBERSHIP_SCAN {
            return Err(Error::LengthCap {
                op: "collapse-set membership scan",
                cap: caps::MEMBERSHIP_SCAN,
                len: l,
            });
        }
        let members = (0..1usize << l)
            .into_par_iter()
            .map(|id| in_astar(Configuration::from_id(id, l).expect("id within state space")))
            .collect();
        Ok(Self { len: l, members })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, cfg: Configuration) -> bool {
        debug_assert_eq!(cfg.len(), self.len);
        self.members[cfg.id()]
    }

    pub fn contains_id(&self, id: usize) -> bool {
        self.members[id]
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn as_state_set(&self) -> StateSet {
        StateSet::from_ids(
            self.members.len(),
            self.members
                .iter()
                .enumerate()
                .filter_map(|(id, &m)| m.then_some(id)),
        )
    }
}

/// A member of the collapse set together with every site whose legal flip
/// leaves the set.
#[derive(Clone, Debug)]
pub struct BoundaryMember {
    pub config: Configuration,
    pub witnesses: Vec<usize>,
}

/// All members of the collapse set with at least one legal flip out of it.
pub fn boundary_astar(l: usize) -> Result<Vec<BoundaryMember>> {
    let table = AstarMembers::build(l)?;
    Ok(boundary_of(&table))
}

/// Boundary scan against a prebuilt membership table.
pub fn boundary_of(table: &AstarMembers) -> Vec<BoundaryMember> {
    let l = table.len();
    (0..1usize << l)
        .into_par_iter()
        .filter_map(|id| {
            if !table.contains_id(id) {
                return None;
            }
            let config = Configuration::from_id(id, l).expect("id within state space");
            let witnesses: Vec<usize> = (1..=l)
                .filter(|&x| config.constraint(x) && !table.contains(config.flipped(x)))
                .collect();
            (!witnesses.is_empty()).then_some(BoundaryMember { config, witnesses })
        })
        .collect()
}

/// Stationary mass escaping through one site, split by the spin the flip
/// finds there.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SiteEscape {
    pub site: usize,
    /// mass of boundary members vacant at the site (the flip fills, rate `p`)
    pub vacant_mass: f64,
    /// mass of boundary members occupied at the site (the flip empties, rate `q`)
    pub occupied_mass: f64,
}

/// Escape-rate decomposition of the indicator Dirichlet form: summing
/// `p * vacant + q * occupied` over sites recovers `D(1_A)` exactly.
#[derive(Clone, Debug, Serialize)]
pub struct EscapeDecomposition {
    pub per_site: Vec<SiteEscape>,
    pub total: f64,
}

pub fn escape_decomposition(params: &Params, boundary: &[BoundaryMember]) -> EscapeDecomposition {
    let l = params.len();
    let mut per_site: Vec<SiteEscape> = (1..=l)
        .map(|site| SiteEscape {
            site,
            vacant_mass: 0.0,
            occupied_mass: 0.0,
        })
        .collect();
    for member in boundary {
        let w = weight(member.config, params);
        for &z in &member.witnesses {
            if member.config.is_vacant(z) {
                per_site[z - 1].vacant_mass += w;
            } else {
                per_site[z - 1].occupied_mass += w;
            }
        }
    }
    let total = per_site
        .iter()
        .map(|s| params.p() * s.vacant_mass + params.q() * s.occupied_mass)
        .sum();
    EscapeDecomposition { per_site, total }
}

/// Whether the interval `[a, b]` in `[0, L]` either covers `[0, L]` or has a
/// vacancy of `eta` (the frozen origin included) in its flanks: distances up
/// to `b - a - 1` on the left of `a`, up to `b - a` on the right of `b`.
pub fn flank_has_vacancy(eta: Configuration, a: usize, b: usize) -> bool {
    let l = eta.len();
    debug_assert!(a < b && b <= l);
    if a == 0 && b == l {
        return true;
    }
    let ell = b - a;
    for t in 1..ell {
        if a >= t && eta.spin(a - t) == 0 {
            return true;
        }
    }
    for t in 1..=ell {
        if b + t <= l && eta.spin(b + t) == 0 {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{indicator_dirichlet, Generator};

    #[test]
    fn known_member_and_witness() {
        let boundary = boundary_astar(4).unwrap();
        let probe = Configuration::from_str_spins("0010").unwrap();
        let hit = boundary.iter().find(|m| m.config == probe).unwrap();
        assert_eq!(hit.witnesses, vec![1, 3]);
        assert!(boundary.iter().all(|m| m.config != Configuration::all_ones(4)));
        // the right edge stays vacant on the whole boundary
        for l in 1..=10usize {
            for m in boundary_astar(l).unwrap() {
                assert!(m.config.is_vacant(l));
            }
        }
    }

    #[test]
    fn boundary_sizes_pinned() {
        let sizes: Vec<usize> = (1..=10usize)
            .map(|l| boundary_astar(l).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![1, 1, 1, 1, 2, 3, 7, 13, 24, 45]);
    }

    #[test]
    fn escape_total_matches_edge_sum() {
        for l in 1..=8usize {
            let table = AstarMembers::build(l).unwrap();
            let boundary = boundary_of(&table);
            let set = table.as_state_set();
            for q in [0.05, 0.2, 0.4] {
                let params = Params::new(l, q).unwrap();
                let gen = Generator::build(&params).unwrap();
                let via_edges = indicator_dirichlet(&gen, &set);
                let via_sites = escape_decomposition(&params, &boundary).total;
                assert!(
                    (via_edges - via_sites).abs() < 1e-12,
                    "L={} q={}: {} vs {}",
                    l,
                    q,
                    via_edges,
                    via_sites
                );
            }
        }
    }

    #[test]
    fn every_enclosing_interval_flanks_a_vacancy() {
        for l in 2..=10usize {
            for member in boundary_astar(l).unwrap() {
                for &z in &member.witnesses {
                    for a in 0..z {
                        for b in z..=l {
                            assert!(
                                flank_has_vacancy(member.config, a, b),
                                "L={} {} z={} I=[{},{}]",
                                l,
                                member.config,
                                z,
                                a,
                                b
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn size_cap_and_empty_chain_rejected() {
        assert!(matches!(
            AstarMembers::build(17),
            Err(Error::LengthCap { .. })
        ));
        assert!(matches!(AstarMembers::build(0), Err(Error::EmptyChain)));
    }
}
