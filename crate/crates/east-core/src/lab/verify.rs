//! Verification suites: each one grades a family of exact inequalities or
//! structural facts over the grid and reports hard verdicts. The
//! [`traceability`] table maps every check label that can appear in a report
//! to the mathematical statement it grades.

use crate::bottleneck::{
    block_ladder, bottleneck_lower_bound, boundary_astar, count_d_strings, delta_chain,
    enumerate_gamma, escape_decomposition, in_astar, reachable_set, AstarMembers,
};
use crate::error::Result;
use crate::exact::{self, indicator_dirichlet, mean_hitting_time, Engine, StateSet};
use crate::graphical::couple_all_adaptive;
use crate::lab::grid::Grid;
use crate::lab::report::Report;
use crate::lab::scenario::{envelope, scenario_equivalence};
use crate::model::{ceil_log2, transitions, weight};
use crate::network::{
    b_ell, capacity, effective_resistance, equilibrium_flow, flow_energy,
    hitting_capacity_identity, resit_construction, Flow, Network,
};
use crate::{Configuration, Params};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Core,
    Coupling,
    Equo,
    Dominare,
    Paletti,
    Astar,
    Gamma,
    Flows,
    Capacity,
    All,
}

impl Suite {
    /// The concrete suites, in the order `all` runs them.
    pub const MEMBERS: [Suite; 9] = [
        Suite::Core,
        Suite::Coupling,
        Suite::Equo,
        Suite::Dominare,
        Suite::Paletti,
        Suite::Astar,
        Suite::Gamma,
        Suite::Flows,
        Suite::Capacity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Coupling => "coupling",
            Suite::Equo => "equo",
            Suite::Dominare => "dominare",
            Suite::Paletti => "paletti",
            Suite::Astar => "astar",
            Suite::Gamma => "gamma",
            Suite::Flows => "flows",
            Suite::Capacity => "capacity",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "core" => Some(Suite::Core),
            "coupling" => Some(Suite::Coupling),
            "equo" => Some(Suite::Equo),
            "dominare" => Some(Suite::Dominare),
            "paletti" => Some(Suite::Paletti),
            "astar" => Some(Suite::Astar),
            "gamma" => Some(Suite::Gamma),
            "flows" => Some(Suite::Flows),
            "capacity" => Some(Suite::Capacity),
            "all" => Some(Suite::All),
            _ => None,
        }
    }

    pub fn run(self, grid: &Grid) -> Result<Vec<Report>> {
        grid.validate()?;
        match self {
            Suite::Core => Ok(vec![suite_core(grid)?]),
            Suite::Coupling => Ok(vec![suite_coupling(grid)?]),
            Suite::Equo => Ok(vec![suite_equo(grid)?]),
            Suite::Dominare => Ok(vec![suite_dominare(grid)?]),
            Suite::Paletti => Ok(vec![suite_paletti(grid)?]),
            Suite::Astar => Ok(vec![suite_astar(grid)?]),
            Suite::Gamma => Ok(vec![suite_gamma(grid)?]),
            Suite::Flows => Ok(vec![suite_flows(grid)?]),
            Suite::Capacity => Ok(vec![suite_capacity(grid)?]),
            Suite::All => {
                let mut out = Vec::with_capacity(Suite::MEMBERS.len());
                for suite in Suite::MEMBERS {
                    out.extend(suite.run(grid)?);
                }
                Ok(out)
            }
        }
    }
}

/// Generator structure: detailed balance, normalisation, and the legality
/// of every listed transition, scanned over the full state space.
fn suite_core(grid: &Grid) -> Result<Report> {
    let mut report = Report::new(
        "core",
        &["L", "q", "balance_residual", "pi_sum_error", "bad_transitions"],
    );
    for &l in &grid.lens {
        for &q in &grid.qs {
            let ctx = format!("L={} q={}", l, q);
            if l > 16 {
                report.push_row(
                    vec![l as f64, q, f64::NAN, f64::NAN, f64::NAN],
                    "skipped: full space scan cap",
                );
                continue;
            }
            let params = Params::new_wide(l, q)?;
            let gen = Engine::new(&params)?;
            let gen = gen.generator();
            let balance = gen.reversibility_residual();
            let pi_err = (gen.pi().iter().sum::<f64>() - 1.0).abs();
            let weight_err = ((0..1usize << l)
                .map(|id| weight(Configuration::from_id(id, l).unwrap(), &params))
                .sum::<f64>()
                - 1.0)
                .abs();
            let mut bad = 0usize;
            for id in 0..1usize << l {
                let cfg = Configuration::from_id(id, l)?;
                let moves = transitions(cfg, &params);
                let legal = 1 + (2..=l).filter(|&x| cfg.is_vacant(x - 1)).count();
                if moves.len() != legal {
                    bad += 1;
                }
                for tr in moves {
                    let constrained = tr.site == 1 || cfg.is_vacant(tr.site - 1);
                    let expected = if tr.to.spin(tr.site) == 0 { q } else { 1.0 - q };
                    if !constrained
                        || tr.from != cfg
                        || tr.to != cfg.flipped(tr.site)
                        || (tr.rate - expected).abs() > 1e-15
                    {
                        bad += 1;
                    }
                }
            }
            report.push_row(
                vec![l as f64, q, balance, pi_err.max(weight_err), bad as f64],
                "",
            );
            report.check_le(
                true,
                "detailed balance holds to machine precision",
                &ctx,
                balance,
                1e-12,
            );
            report.check_le(
                true,
                "the stationary weights sum to one",
                &ctx,
                pi_err.max(weight_err),
                1e-12,
            );
            report.check_flag(
                true,
                "every listed transition is a legal single site refresh",
                &ctx,
                bad == 0,
                -(bad as f64),
            );
        }
    }
    Ok(report)
}

/// Shared-noise replay over every initial state: the ensemble merges, it
/// merges no later than the last site's first legal ring, and the ordered
/// prefix property never breaks. Deterministic given the grid seed.
fn suite_coupling(grid: &Grid) -> Result<Report> {
    let mut report = Report::new(
        "coupling",
        &["L", "q", "coupling_time", "last_tau", "prefix_violations", "horizon"],
    );
    for (i, &l) in [4usize, 6].iter().enumerate() {
        for (j, &q) in grid.qs.iter().enumerate() {
            let ctx = format!("L={} q={}", l, q);
            let params = Params::new_wide(l, q)?;
            let seed = grid
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(90_000 + (i * grid.qs.len() + j) as u64);
            let horizon = 8.0 * envelope(l, q) + 16.0;
            let run = couple_all_adaptive(&params, seed, horizon, 8)?;
            let last = *run.tau_site.last().unwrap();
            report.push_row(
                vec![
                    l as f64,
                    q,
                    run.coupling_time,
                    last,
                    run.prefix_violations as f64,
                    run.horizon,
                ],
                "",
            );
            report.check_flag(
                true,
                "every pair of initial states has merged",
                &ctx,
                run.fully_coupled(),
                run.horizon - run.coupling_time,
            );
            report.check_le(
                true,
                "merging happens by the last legal ring",
                &ctx,
                run.coupling_time,
                last,
            );
            report.check_flag(
                true,
                "ordered initial states stay ordered",
                &ctx,
                run.prefix_violations == 0,
                -(run.prefix_violations as f64),
            );
        }
    }
    Ok(report)
}

fn suite_equo(grid: &Grid) -> Result<Report> {
    let mut report = scenario_equivalence(grid)?;
    report.scenario = "equo".into();
    Ok(report)
}

/// Hitting-time comparisons: the shrunk chain pins the collapsed start, the
/// quarter quantile pins mixing and hitting, survival tails are geometric
/// in quantile steps, early arrivals carry the Markov factor, and the worst
/// case survival is submultiplicative with the all occupied state extremal.
fn suite_dominare(grid: &Grid) -> Result<Report> {
    let mut report = Report::new(
        "dominare",
        &["L", "q", "t_hat", "t_hit", "t_rel", "t_mix", "t_quarter"],
    );
    for &q in &grid.qs {
        report.push_fit(
            format!("n_star(q={})", q),
            (1.0 / q).log2(),
            "crossover block count",
        );
    }
    for &l in &grid.lens {
        if !(2..=exact::caps::MIXING).contains(&l) {
            continue;
        }
        for &q in &grid.qs {
            let ctx = format!("L={} q={}", l, q);
            let params = Params::new_wide(l, q)?;
            let engine = Engine::new(&params)?;
            let ts = engine.timescales()?;
            let (trel, tmix, thit, tq) = (
                ts.trel.value,
                ts.tmix.value,
                ts.thit.value,
                ts.tquant.value,
            );
            let shrunk = Params::new_wide(l - 1, q)?;
            let t_hat = mean_hitting_time(
                &shrunk,
                Configuration::all_ones(l - 1),
                &StateSet::spin_is(l - 1, l - 1, 0),
            )?
            .value;
            report.push_row(vec![l as f64, q, t_hat, thit, trel, tmix, tq], "");
            report.check_le(
                true,
                "the shrunk chain's vacancy time bounds the hitting time below",
                &ctx,
                t_hat,
                thit,
            );
            report.check_le(
                true,
                "the hitting time is at most five times the shrunk chain's vacancy time",
                &ctx,
                thit,
                5.0 * t_hat,
            );
            report.check_le(true, "t_rel <= t_mix", &ctx, trel, tmix);
            report.check_le(true, "t_mix <= t_quarter", &ctx, tmix, tq);
            report.check_le(true, "t_hit / 4 <= t_quarter", &ctx, thit / 4.0, tq);
            report.check_le(true, "t_quarter <= 4 t_hit", &ctx, tq, 4.0 * thit);

            let hit_target = StateSet::spin_is(l, l, 1);
            let origin = Configuration::single_right_vacancy(l);
            for f in [0.5, 1.0, 2.0, 4.0, 8.0] {
                let t = f * tq;
                let surv = engine.survival(origin, &hit_target, t)?;
                let bound = 0.25f64.powi((t / tq + 1e-9).floor() as i32);
                report.check_le(
                    true,
                    "the survival tail is geometric in quantile steps",
                    &format!("{} t={:.3}", ctx, t),
                    surv,
                    bound,
                );
            }
            for f in [0.01, 0.1, 0.5, 1.0] {
                let t = f * thit;
                let arrived = 1.0 - engine.survival(origin, &hit_target, t)?;
                report.check_le(
                    true,
                    "early arrival carries the Markov factor e t over the mean",
                    &format!("{} t={:.3}", ctx, t),
                    arrived,
                    std::f64::consts::E * t / thit,
                );
            }

            // the vacancy flavour: hitting a vacancy at the last site from
            // the all occupied state
            let vac_target = StateSet::spin_is(l, l, 0);
            let ones = Configuration::all_ones(l);
            let t_hat_full = engine.mean_hitting(ones, &vac_target)?.value;
            for f in [0.01, 0.1, 0.5, 1.0] {
                let t = f * t_hat_full;
                let arrived = 1.0 - engine.survival(ones, &vac_target, t)?;
                report.check_le(
                    true,
                    "early vacancy at the last site carries the Markov factor",
                    &format!("{} t={:.3}", ctx, t),
                    arrived,
                    std::f64::consts::E * t / t_hat_full,
                );
            }

            if l <= 6 {
                let starts: Vec<Configuration> = (0..1usize << l)
                    .map(|id| Configuration::from_id(id, l).unwrap())
                    .filter(|c| c.spin(l) == 1)
                    .collect();
                let u = |t: f64| -> Result<(f64, f64)> {
                    let mut max = 0.0f64;
                    let mut ones_val = 0.0;
                    for &s in &starts {
                        let v = engine.survival_spectral(s, &vac_target, t)?;
                        max = max.max(v);
                        if s.id() == ones.id() {
                            ones_val = v;
                        }
                    }
                    Ok((max, ones_val))
                };
                let fs = [0.25, 0.5, 1.0, 2.0];
                let mut base = Vec::new();
                for &f in &fs {
                    let (max, at_ones) = u(f * t_hat_full)?;
                    report.check_flag(
                        true,
                        "the all occupied state is the worst start for vacating the last site",
                        &format!("{} t={:.3}", ctx, f * t_hat_full),
                        max - at_ones <= 1e-10,
                        1e-10 - (max - at_ones),
                    );
                    base.push(max);
                }
                for (i, &fi) in fs.iter().enumerate() {
                    for (j, &fj) in fs.iter().enumerate() {
                        let (sum, _) = u((fi + fj) * t_hat_full)?;
                        report.check_flag(
                            true,
                            "the worst case survival is submultiplicative",
                            &format!("{} t={:.3} s={:.3}", ctx, fi * t_hat_full, fj * t_hat_full),
                            sum <= base[i] * base[j] + 1e-10,
                            base[i] * base[j] + 1e-10 - sum,
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Lower bounds from the collapse set and the vacancy budget closure, and
/// the nonnegative slack of the chained ladder.
fn suite_paletti(grid: &Grid) -> Result<Report> {
    let mut report = Report::new(
        "paletti",
        &["L", "q", "t_rel", "lower_astar", "lower_closure"],
    );
    for &l in &grid.lens {
        if !(2..=8).contains(&l) {
            continue;
        }
        let astar = AstarMembers::build(l)?.as_state_set();
        let closure = reachable_set(
            Configuration::single_right_vacancy(l),
            ceil_log2(l) + 1,
        )?;
        // at very small lengths the vacancy budget covers the whole space
        // and the indicator has no variance to compare against
        let closure_proper = closure.members().count() < (1usize << l);
        for &q in &grid.qs {
            let ctx = format!("L={} q={}", l, q);
            let params = Params::new_wide(l, q)?;
            let trel = Engine::new(&params)?.relaxation_time()?.value;
            let lower_astar = bottleneck_lower_bound(&params, &astar)?.ratio;
            let lower_closure = if closure_proper {
                let v = bottleneck_lower_bound(&params, closure.members())?.ratio;
                report.check_le(
                    true,
                    "the vacancy budget closure is a valid bottleneck",
                    &ctx,
                    v,
                    trel,
                );
                v
            } else {
                f64::NAN
            };
            report.push_row(vec![l as f64, q, trel, lower_astar, lower_closure], "");
            report.check_le(
                true,
                "the collapse set bottleneck bounds t_rel below",
                &ctx,
                lower_astar,
                trel,
            );
        }
    }
    for &q in &grid.qs {
        let ladder = block_ladder(3, q)?;
        for i in 1..ladder.rungs.len() {
            if let Some(slack) = ladder.chained_slack(i) {
                report.check_flag(
                    true,
                    "the ladder slack chain stays nonnegative",
                    &format!("q={} rung {}", q, ladder.rungs[i].len),
                    slack >= 0.0,
                    slack,
                );
            }
        }
    }
    Ok(report)
}

const BOUNDARY_SIZES: [usize; 10] = [1, 1, 1, 1, 2, 3, 7, 13, 24, 45];

/// Structure of the collapse set: origin membership, last-site exclusion,
/// agreement with the deterministic collapse, witness integrity, the frozen
/// boundary census, and the escape decomposition against the Dirichlet
/// form.
fn suite_astar(grid: &Grid) -> Result<Report> {
    let mut report = Report::new("astar", &["L", "q", "members", "boundary", "escape_total"]);
    for &l in &grid.lens {
        if l > 10 {
            continue;
        }
        let table = AstarMembers::build(l)?;
        let set = table.as_state_set();
        let boundary = boundary_astar(l)?;
        let ctx = format!("L={}", l);
        report.check_flag(
            true,
            "the collapsed state is a member",
            &ctx,
            table.contains(Configuration::single_right_vacancy(l)),
            0.0,
        );
        let occupied_last = set
            .iter()
            .filter(|&id| Configuration::from_id(id, l).unwrap().spin(l) == 1)
            .count();
        report.check_flag(
            true,
            "no member occupies the last site",
            &ctx,
            occupied_last == 0,
            -(occupied_last as f64),
        );
        let mismatches = (0..1usize << l)
            .filter(|&id| {
                table.contains_id(id) != in_astar(Configuration::from_id(id, l).unwrap())
            })
            .count();
        report.check_flag(
            true,
            "membership equals passing the deterministic collapse",
            &ctx,
            mismatches == 0,
            -(mismatches as f64),
        );
        let witnessless = boundary.iter().filter(|m| m.witnesses.is_empty()).count();
        report.check_flag(
            true,
            "every boundary state carries a flip witness",
            &ctx,
            witnessless == 0,
            -(witnessless as f64),
        );
        report.check_flag(
            true,
            "the boundary census matches the frozen counts",
            &ctx,
            boundary.len() == BOUNDARY_SIZES[l - 1],
            boundary.len() as f64 - BOUNDARY_SIZES[l - 1] as f64,
        );
        for &q in &grid.qs {
            let params = Params::new_wide(l, q)?;
            let escape = escape_decomposition(&params, &boundary);
            let dirichlet = indicator_dirichlet(Engine::new(&params)?.generator(), &set);
            let residual =
                (escape.total - dirichlet).abs() / dirichlet.abs().max(f64::MIN_POSITIVE);
            report.push_row(
                vec![
                    l as f64,
                    q,
                    set.count() as f64,
                    boundary.len() as f64,
                    escape.total,
                ],
                "",
            );
            report.check_le(
                true,
                "the boundary escape decomposition matches the Dirichlet form",
                &format!("L={} q={}", l, q),
                residual,
                1e-8,
            );
        }
    }
    Ok(report)
}

const D_STRING_COUNTS: [u128; 6] = [1, 2, 7, 41, 397, 6377];

/// Counting layer over the escape families: frozen string and family
/// censuses, structural integrity of every enumerated family, boundary
/// escape runs beginning with an enumerated family, and the counting bound
/// on the escape rate.
fn suite_gamma(grid: &Grid) -> Result<Report> {
    let mut report = Report::new("gamma", &["L", "q", "n", "escape", "count_bound"]);
    let strings_ok =
        (0..D_STRING_COUNTS.len()).all(|i| count_d_strings(i + 1) == D_STRING_COUNTS[i]);
    report.check_flag(
        true,
        "the distance string census matches the frozen counts",
        "n <= 6",
        strings_ok,
        0.0,
    );
    for (l, expected) in [
        (4usize, vec![2usize, 3, 3, 2]),
        (8, vec![7, 13, 18, 22, 22, 18, 13, 7]),
    ] {
        let n = ceil_log2(l);
        let counts: Result<Vec<usize>> = (1..=l)
            .map(|z0| Ok(enumerate_gamma(z0, n, l)?.len()))
            .collect();
        let counts = counts?;
        report.check_flag(
            true,
            "the family census matches the frozen counts",
            &format!("L={}", l),
            counts == expected,
            0.0,
        );
    }
    for &l in &grid.lens {
        if !(2..=10).contains(&l) {
            continue;
        }
        let n = ceil_log2(l);
        let mut malformed = 0usize;
        let mut total = 0usize;
        for z0 in 1..=l {
            let families = enumerate_gamma(z0, n, l)?;
            total += families.len();
            for family in &families {
                let sorted = family.windows(2).all(|w| w[0] < w[1]);
                let in_range = family.iter().all(|&s| s <= l);
                if family.len() != n + 1 || !family.contains(&(z0 - 1)) || !sorted || !in_range {
                    malformed += 1;
                }
            }
        }
        report.check_flag(
            true,
            "every enumerated family anchors at its witness and stays sorted",
            &format!("L={}", l),
            malformed == 0,
            -(malformed as f64),
        );
        if l <= 8 {
            let mut broken = 0usize;
            for member in boundary_astar(l)? {
                for &z0 in &member.witnesses {
                    let chain = delta_chain(member.config, z0)?;
                    let mut prefix: Vec<usize> = chain.sites.iter().take(n + 1).copied().collect();
                    prefix.sort_unstable();
                    if chain.k() < n + 1 || !enumerate_gamma(z0, n, l)?.contains(&prefix) {
                        broken += 1;
                    }
                }
            }
            report.check_flag(
                true,
                "every boundary escape run begins with an enumerated family",
                &format!("L={}", l),
                broken == 0,
                -(broken as f64),
            );
        }
        let set = AstarMembers::build(l)?.as_state_set();
        for &q in &grid.qs {
            let params = Params::new_wide(l, q)?;
            let escape = indicator_dirichlet(Engine::new(&params)?.generator(), &set);
            let bound = q.powi(n as i32 + 1) * total as f64;
            report.push_row(vec![l as f64, q, n as f64, escape, bound], "");
            report.check_le(
                true,
                "the escape rate is inside the counting bound",
                &format!("L={} q={}", l, q),
                escape,
                bound,
            );
        }
    }
    Ok(report)
}

/// A four-edge circulation supported on flips of sites 1 and 3 from the
/// empty chain; adding it to a unit flow keeps the strength and divergences.
fn square_circulation(l: usize) -> Result<Flow> {
    let mut circ = Flow::new(l);
    circ.add(0, 1, 0.5)?;
    circ.add(1, 5, 0.5)?;
    circ.add(5, 4, 0.5)?;
    circ.add(4, 0, 0.5)?;
    Ok(circ)
}

/// Electrical flows: the equilibrium flow is a certified unit flow whose
/// energy is the effective resistance and which no competitor beats, and
/// the doubling construction certificate holds at its first step.
fn suite_flows(grid: &Grid) -> Result<Report> {
    let mut report = Report::new(
        "flows",
        &["L", "q", "energy", "resistance", "strength_error", "max_divergence"],
    );
    for &l in &grid.lens {
        if !(3..=6).contains(&l) {
            continue;
        }
        let ones = StateSet::singleton(1 << l, (1 << l) - 1);
        let sink = b_ell(l, l)?;
        for &q in &grid.qs {
            let ctx = format!("L={} q={}", l, q);
            let params = Params::new_wide(l, q)?;
            let net = Network::build(&params)?;
            let flow = equilibrium_flow(&params, &ones, &sink)?;
            let energy = flow_energy(&net, &flow)?;
            let resistance = effective_resistance(&params, &ones, &sink)?;
            let strength_error = (flow.strength(&ones) - 1.0).abs();
            let max_divergence = flow
                .divergences()
                .iter()
                .enumerate()
                .filter(|&(id, _)| !ones.contains(id) && !sink.contains(id))
                .map(|(_, d)| d.abs())
                .fold(0.0, f64::max);
            report.push_row(
                vec![l as f64, q, energy, resistance, strength_error, max_divergence],
                "",
            );
            report.check_le(
                true,
                "the equilibrium flow carries unit strength",
                &ctx,
                strength_error,
                1e-12,
            );
            report.check_le(
                true,
                "the equilibrium flow is divergence free off its poles",
                &ctx,
                max_divergence,
                1e-12,
            );
            report.check_le(
                true,
                "the equilibrium energy equals the effective resistance",
                &ctx,
                (energy - resistance).abs() / resistance,
                1e-8,
            );
            let competitor = flow.plus(&square_circulation(l)?)?;
            report.check_le(
                true,
                "no unit flow beats the equilibrium energy",
                &ctx,
                energy,
                flow_energy(&net, &competitor)?,
            );
        }
    }
    for &q in &grid.qs {
        let cert = resit_construction(1, 3, q)?;
        let ctx = format!("q={}", q);
        report.check_flag(
            true,
            "the recursion flow is certified unit and divergence free",
            &ctx,
            (cert.strength - 1.0).abs() <= 1e-10
                && cert.divergence_residual <= 1e-10
                && cert.sink_violation <= 1e-12,
            1e-10 - cert.divergence_residual,
        );
        report.check_le(
            true,
            "the recursion bound dominates the next resistance",
            &ctx,
            cert.r_next,
            cert.bound,
        );
    }
    Ok(report)
}

/// Capacities: internal consistency of the jump chain route, the identity
/// with mean hitting times, the product sandwich, and symmetry.
fn suite_capacity(grid: &Grid) -> Result<Report> {
    let mut report = Report::new(
        "capacity",
        &["L", "q", "capacity", "t_hit", "identity_residual"],
    );
    for &l in &grid.lens {
        if !(2..=8).contains(&l) {
            continue;
        }
        let origin = Configuration::single_right_vacancy(l);
        let source = StateSet::singleton(1 << l, origin.id());
        let sink = StateSet::spin_is(l, l, 1);
        for &q in &grid.qs {
            let ctx = format!("L={} q={}", l, q);
            let params = Params::new_wide(l, q)?;
            let cap = capacity(&params, &source, &sink)?;
            let identity = hitting_capacity_identity(&params, &origin, &sink)?;
            report.push_row(
                vec![l as f64, q, cap.value, identity.hitting, identity.residual],
                "",
            );
            report.check_le(
                true,
                "the jump chain capacity matches its Dirichlet form",
                &ctx,
                cap.residual,
                1e-8,
            );
            report.check_le(
                true,
                "mean hitting times factor through capacity and harmonic mass",
                &ctx,
                identity.residual,
                1e-8,
            );
            let product = identity.hitting * cap.value;
            report.check_le(
                true,
                "the hitting capacity product is at least q p^(L-1)",
                &ctx,
                q * (1.0 - q).powi(l as i32 - 1),
                product,
            );
            report.check_le(
                true,
                "the hitting capacity product is at most q",
                &ctx,
                product,
                q,
            );
            let reversed = capacity(&params, &sink, &source)?;
            report.check_le(
                true,
                "capacity is symmetric in its poles",
                &ctx,
                (cap.value - reversed.value).abs() / cap.value,
                1e-8,
            );
        }
    }
    Ok(report)
}

/// What each check label grades. Every label a report can emit appears
/// here; the table is the contract between the printed verdicts and the
/// mathematics they stand for.
pub fn traceability() -> &'static [(&'static str, &'static str)] {
    &[
        // time scale orderings
        ("(1-q)^L t_hit <= t_rel", "(1-q)^L E_10[tau] <= T_rel(L)"),
        ("t_rel <= t_mix", "T_rel(L) <= T_mix(L) at threshold 1/(2e)"),
        ("t_mix <= 4 t_hit", "T_mix(L) <= 4 E_10[tau]"),
        ("t_mix <= t_quarter", "T_mix(L) <= T(L), the 1/4 survival quantile"),
        ("t_hit / 4 <= t_quarter", "E_10[tau] / 4 <= T(L)"),
        ("t_quarter <= 4 t_hit", "T(L) <= 4 E_10[tau]"),
        // envelope and bottlenecks
        (
            "the collapse set bottleneck bounds t_rel below",
            "pi(A*) pi(A*^c) / D(1_A*) <= T_rel(L)",
        ),
        (
            "one ladder rung grows t_rel by at most its overlap factor",
            "T_rel(len_i) <= 2/(1 - sqrt(eps_{i-1})) T_rel(len_{i-1}) on the doubling ladder",
        ),
        (
            "the chained ladder product stays above t_rel",
            "T_rel(len_i) <= T_rel(3) prod_{j<=i} 2/(1 - sqrt(eps_{j-1}))",
        ),
        (
            "the fitted envelope exponents stay finite",
            "regressed alpha, alpha' in T_rel = n!/(q^n 2^(n choose 2)) q^{-alpha'..alpha} are finite",
        ),
        (
            "the vacancy budget closure is a valid bottleneck",
            "pi(Z) pi(Z^c) / D(1_Z) <= T_rel(L) for the vacancy budget closure Z of the collapsed state",
        ),
        (
            "the ladder slack chain stays nonnegative",
            "2/(1 - sqrt(eps_{i-1})) T_rel(len_{i-1}) - T_rel(len_i) >= 0",
        ),
        // separation of scales
        (
            "t_rel is monotone in the chain length",
            "L <= L' implies T_rel(L) <= T_rel(L')",
        ),
        (
            "across a dyadic jump the ratio grows as the density falls",
            "ceil(log2 L') > ceil(log2 L) implies T_rel(L')/T_rel(L) grows without bound as q -> 0",
        ),
        (
            "at the same dyadic scale the ratio stays below 20",
            "ceil(log2 L') = ceil(log2 L) implies T_rel(L')/T_rel(L) stays bounded as q -> 0",
        ),
        (
            "the equilibrium scale ratio stays below 20",
            "T_rel(d/q) / T_rel(1/q) stays bounded as q -> 0, for fixed d",
        ),
        (
            "below exponent one half the doubled ratio grows as the density falls",
            "gamma < 1/2 implies T_rel(2L)/T_rel(L) grows at L = d q^{-gamma} as q -> 0",
        ),
        // heterogeneity
        (
            "a long domain's rightmost vacancy survives the shorter relaxation scale",
            "P(eta_L(t) = 0) -> 1 at t = T_rel(eps d q^{-gamma}) from a domain of length d q^{-gamma}",
        ),
        (
            "survival degrades as the comparison scale grows",
            "P(eta_L(t) = 0) is nonincreasing in the scale fraction eps, within sampling error",
        ),
        (
            "a site that started occupied is vacant with probability at most q",
            "P_1(eta_x(t) = 0) <= q for every t and x, within sampling error",
        ),
        // exponential law
        (
            "the sampled mean matches the exact mean within four standard errors",
            "the sampled mean of tau agrees with E_10[tau] from the absorbing solve",
        ),
        (
            "the exponential fit tightens as the density falls",
            "sup_t |P(tau/E[tau] > t) - e^{-t}| decreases along falling q",
        ),
        (
            "the scaled hitting law is within 0.1 of exponential at the smallest density",
            "sup_t |P(tau/E[tau] > t) - e^{-t}| < 0.1 at the smallest grid density",
        ),
        // generator structure
        (
            "detailed balance holds to machine precision",
            "max |pi(x) c(x,y) - pi(y) c(y,x)| < 1e-12",
        ),
        (
            "the stationary weights sum to one",
            "|sum_eta q^{zeros} p^{ones} - 1| < 1e-12",
        ),
        (
            "every listed transition is a legal single site refresh",
            "each generator move flips one site with a vacant left neighbour at rate q or p",
        ),
        // coupling
        (
            "every pair of initial states has merged",
            "the shared noise replay of all 2^L initial states reaches a single state",
        ),
        (
            "merging happens by the last legal ring",
            "the merge time is at most the first legal ring at site L of the all ones run",
        ),
        (
            "ordered initial states stay ordered",
            "after the first legal ring at x the ensemble agrees on [1, x] for good",
        ),
        // hitting comparisons
        (
            "the shrunk chain's vacancy time bounds the hitting time below",
            "E_1[tau-hat_{L-1}] <= E_10[tau_L]",
        ),
        (
            "the hitting time is at most five times the shrunk chain's vacancy time",
            "E_10[tau_L] <= 5 E_1[tau-hat_{L-1}]",
        ),
        (
            "the survival tail is geometric in quantile steps",
            "P_10(tau > t) <= (1/4)^floor(t / T(L))",
        ),
        (
            "early arrival carries the Markov factor e t over the mean",
            "P_10(tau < t) <= e t / E_10[tau]",
        ),
        (
            "early vacancy at the last site carries the Markov factor",
            "P_1(tau-hat < t) <= e t / E_1[tau-hat]",
        ),
        (
            "the worst case survival is submultiplicative",
            "u(t + s) <= u(t) u(s) for u(t) = max_eta P_eta(tau-hat > t)",
        ),
        (
            "the all occupied state is the worst start for vacating the last site",
            "max_eta P_eta(tau-hat > t) is attained at the all ones state",
        ),
        // collapse set structure
        (
            "the collapsed state is a member",
            "the single right vacancy state passes the deterministic collapse",
        ),
        (
            "no member occupies the last site",
            "the collapse set is disjoint from {eta_L = 1}",
        ),
        (
            "membership equals passing the deterministic collapse",
            "the membership table equals the set of states whose staged collapse ends at the single right vacancy",
        ),
        (
            "every boundary state carries a flip witness",
            "each boundary member lists a site whose flip leaves the collapse set",
        ),
        (
            "the boundary census matches the frozen counts",
            "boundary sizes for L = 1..10 equal 1,1,1,1,2,3,7,13,24,45",
        ),
        (
            "the boundary escape decomposition matches the Dirichlet form",
            "summing pi times rate over boundary flips reproduces D(1_A*)",
        ),
        // escape families
        (
            "the distance string census matches the frozen counts",
            "distance string counts for n = 1..6 equal 1,2,7,41,397,6377",
        ),
        (
            "every enumerated family anchors at its witness and stays sorted",
            "each family holds n+1 distinct increasing sites in [0, L] containing z0 - 1",
        ),
        (
            "the family census matches the frozen counts",
            "family counts per witness equal 2,3,3,2 at L=4 and 7,13,18,22,22,18,13,7 at L=8",
        ),
        (
            "every boundary escape run begins with an enumerated family",
            "the first n+1 absorbed sites of each boundary run form an enumerated family",
        ),
        (
            "the escape rate is inside the counting bound",
            "D(1_A*) <= q^{n+1} sum_z0 |Gamma_z0(n, L)|",
        ),
        // electrical network
        (
            "the equilibrium flow carries unit strength",
            "the equilibrium flow pushes total mass one out of its source",
        ),
        (
            "the equilibrium flow is divergence free off its poles",
            "node balance holds away from source and sink",
        ),
        (
            "the equilibrium energy equals the effective resistance",
            "sum theta(e)^2 / c(e) = R(source, sink)",
        ),
        (
            "no unit flow beats the equilibrium energy",
            "adding a circulation to the equilibrium flow cannot lower the energy",
        ),
        (
            "the recursion flow is certified unit and divergence free",
            "the doubling step flow has unit strength and vanishing interior divergence",
        ),
        (
            "the recursion bound dominates the next resistance",
            "R(len_{i+1}) <= (4 + 6/(q N)) R(len_i) along the doubling ladder",
        ),
        // capacities
        (
            "the jump chain capacity matches its Dirichlet form",
            "escape probability and harmonic Dirichlet routes to cap(a, B) agree",
        ),
        (
            "mean hitting times factor through capacity and harmonic mass",
            "E_a[tau_B] cap(a, B) = sum_x pi(x) P_x(hit a before B)",
        ),
        (
            "the hitting capacity product is at least q p^(L-1)",
            "q p^{L-1} <= E_10[tau] cap(10, {eta_L = 1})",
        ),
        (
            "the hitting capacity product is at most q",
            "E_10[tau] cap(10, {eta_L = 1}) <= q",
        ),
        (
            "capacity is symmetric in its poles",
            "cap(A, B) = cap(B, A)",
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::scenario::{Scenario, ScenarioKind};
    use std::collections::HashSet;

    fn small_grid() -> Grid {
        Grid {
            lens: (1..=6).collect(),
            qs: vec![0.2, 0.3],
            gammas: vec![0.4],
            ds: vec![1.0],
            seed: 1729,
            trials: 300,
        }
    }

    #[test]
    fn every_emitted_check_label_is_traced() {
        let table: HashSet<&str> = traceability().iter().map(|(label, _)| *label).collect();
        assert_eq!(table.len(), traceability().len());
        let grid = small_grid();
        let mut labels = HashSet::new();
        for report in Suite::All.run(&grid).unwrap() {
            for v in &report.verdicts {
                labels.insert(v.check.clone());
            }
        }
        for kind in ScenarioKind::ALL {
            let report = Scenario::new(kind, grid.clone()).run().unwrap();
            for v in &report.verdicts {
                labels.insert(v.check.clone());
            }
        }
        for label in &labels {
            assert!(table.contains(label.as_str()), "untraced check: {label}");
        }
    }

    #[test]
    fn all_suites_pass_on_the_small_grid() {
        let reports = Suite::All.run(&small_grid()).unwrap();
        assert_eq!(reports.len(), 9);
        for report in &reports {
            if !report.hard_passed() {
                for line in report.summary_lines() {
                    eprintln!("{line}");
                }
            }
            assert!(report.hard_passed(), "suite {} failed", report.scenario);
        }
        let names: Vec<&str> = reports.iter().map(|r| r.scenario.as_str()).collect();
        assert_eq!(
            names,
            ["core", "coupling", "equo", "dominare", "paletti", "astar", "gamma", "flows", "capacity"]
        );
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::MEMBERS {
            assert_eq!(Suite::parse(suite.name()), Some(suite));
        }
        assert_eq!(Suite::parse("all"), Some(Suite::All));
        assert_eq!(Suite::parse("bogus"), None);
    }

    #[test]
    fn verify_reports_are_deterministic() {
        let grid = Grid {
            lens: vec![4],
            qs: vec![0.3],
            ..Grid::default()
        };
        let a = Suite::Coupling.run(&grid).unwrap();
        let b = Suite::Coupling.run(&grid).unwrap();
        assert_eq!(a[0].to_csv(), b[0].to_csv());
        assert!(a[0].hard_passed());
    }
}
