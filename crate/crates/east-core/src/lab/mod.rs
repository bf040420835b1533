//! Grid-driven experiment layer: scenario sweeps, verification suites, and
//! the report containers their results live in.
//!
//! A [`Grid`] fixes lengths, densities, scale exponents, a seed, and a trial
//! count; a [`Scenario`] or a [`Suite`] walks it and returns [`Report`]s
//! whose rows are the computed columns and whose [`Verdict`]s grade the
//! inequalities the sweep instantiates. Hard verdicts always come from
//! exact solves (or exhaustive replay under a fixed seed) and gate exit
//! codes; soft verdicts grade sampled or asymptotic trends and never gate.
//! Reports are byte-identical across runs of the same grid and seed.

mod grid;
mod mc;
mod report;
mod scenario;
mod verify;

pub use grid::{length_scale, Grid};
pub use mc::{
    binomial_se, event_frequency_at, ks_exponential, mean_and_se, per_trial, sample_taus,
};
pub use report::{Fit, Report, Row, Verdict};
pub use scenario::{
    scenario_equivalence, scenario_exponential_law, scenario_heterogeneity, scenario_paletti,
    scenario_separation, Scenario, ScenarioKind,
};
pub use verify::{traceability, Suite};
