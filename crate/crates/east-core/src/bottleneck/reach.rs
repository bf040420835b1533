//! Closures under legal flips with a ceiling on the number of vacancies,
//! and the low-vacancy sets they generate: the fully evolved `n`-vacancy
//! families and their embeddings with an extra right-edge vacancy.

use super::caps;
use crate::error::{Error, Result};
use crate::exact::StateSet;
use crate::model::Configuration;
use crate::Params;

/// Closure of an origin under legal flips that never exceed a vacancy budget.
pub struct ReachableSet {
    origin: Configuration,
    budget: usize,
    members: StateSet,
}

impl ReachableSet {
    pub fn origin(&self) -> Configuration {
        self.origin
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn members(&self) -> &StateSet {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, cfg: Configuration) -> bool {
        self.members.contains(cfg.id())
    }

    /// Members with a legal flip out of the set, whether the flip leaves by
    /// exceeding the budget or by landing on an unreached configuration.
    pub fn boundary(&self) -> Vec<Configuration> {
        let l = self.origin.len();
        self.members
            .iter()
            .map(|id| Configuration::from_id(id, l).expect("id within state space"))
            .filter(|cfg| {
                (1..=l).any(|x| cfg.constraint(x) && !self.members.contains(cfg.flipped(x).id()))
            })
            .collect()
    }
}

/// Breadth-first closure of `origin` under legal flips keeping at most
/// `budget` vacancies.
pub fn reachable_set(origin: Configuration, budget: usize) -> Result<ReachableSet> {
    let l = origin.len();
    if l > caps::REACH_SEARCH {
        return Err(Error::LengthCap {
            op: "budgeted reachability search",
            cap: caps::REACH_SEARCH,
            len: l,
        });
    }
    if origin.vacancy_count() > budget {
        return Err(Error::InvalidArgument(format!(
            "origin {} exceeds the vacancy budget {}",
            origin, budget
        )));
    }
    let mut members = StateSet::empty(1 << l);
    members.insert(origin.id());
    let mut stack = vec![origin];
    while let Some(cfg) = stack.pop() {
        for x in 1..=l {
            if !cfg.constraint(x) {
                continue;
            }
            let next = cfg.flipped(x);
            if next.vacancy_count() > budget || members.contains(next.id()) {
                continue;
            }
            members.insert(next.id());
            stack.push(next);
        }
    }
    Ok(ReachableSet {
        origin,
        budget,
        members,
    })
}

/// Fully evolved `n`-vacancy families: configurations with exactly `n`
/// vacancies reachable from the filled chain without ever holding more than
/// `n`. The search runs on `[1, 2^n]`, one site wider than the region
/// `[1, 2^n - 1]` the members are confined to, so an escape would surface as
/// a member rather than vanish off the edge.
pub fn v_n(n: usize) -> Result<Vec<Configuration>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "vacancy families need n >= 1".into(),
        ));
    }
    let l = 1usize << n;
    let reach = reachable_set(Configuration::all_ones(l), n)?;
    let members: Vec<Configuration> = reach
        .members()
        .iter()
        .map(|id| Configuration::from_id(id, l).expect("id within state space"))
        .filter(|cfg| cfg.vacancy_count() == n)
        .collect();
    for cfg in &members {
        assert!(
            !cfg.is_vacant(l),
            "fully evolved family escaped its confinement region: {}",
            cfg
        );
    }
    Ok(members)
}

/// The `n`-vacancy families written on a chain of length `l` with one extra
/// vacancy at the right edge.
pub fn u_n(n: usize, l: usize) -> Result<Vec<Configuration>> {
    if l < 1 << n {
        return Err(Error::InvalidArgument(format!(
            "embedding needs length at least {}, got {}",
            1usize << n,
            l
        )));
    }
    let base = v_n(n)?;
    Ok(base
        .into_iter()
        .map(|v| {
            let mut cfg = Configuration::all_ones(l).with_spin(l, 0);
            for z in v.vacancies() {
                cfg = cfg.with_spin(z, 0);
            }
            cfg
        })
        .collect())
}

/// Exact stationary mass of the embedded families: every member carries
/// `n + 1` vacancies, so the mass is a single weight times the family count.
pub fn embedded_family_mass(params: &Params, n: usize) -> Result<f64> {
    let members = u_n(n, params.len())?;
    let count = members.len() as f64;
    let l = params.len() as i32;
    Ok(params.q().powi(n as i32 + 1) * params.p().powi(l - n as i32 - 1) * count)
}
