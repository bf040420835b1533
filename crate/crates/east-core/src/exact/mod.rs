//! Exact finite-state analysis: generator assembly, spectral gap, mixing
//! time, mean hitting times, hitting-time distributions and quantiles, and
//! Dirichlet forms, all on the full `2^L` state space.

mod dirichlet;
mod engine;
mod generator;
mod hitting;
mod semigroup;
mod set;
mod spectral;

pub use dirichlet::{dirichlet_form, dirichlet_form_local, indicator_dirichlet, variance};
pub use engine::{mixing_time, quantile_time, survival, Engine, TimescaleReport};
pub use generator::Generator;
pub use hitting::{mean_hitting_time, mean_hitting_time_of};
pub use semigroup::{bisect_level, survival_uniformised, SurvivalSeries};
pub use set::StateSet;
pub use spectral::{relaxation_time, relaxation_time_of, FullSpectral};

pub(crate) use hitting::solve_absorbing;

use serde::Serialize;

/// Caps on the exactly solvable sizes.
pub mod caps {
    /// Largest `L` for which a generator is assembled at all.
    pub const GENERATOR: usize = 24;
    /// Largest `L` the matrix-free iterative eigensolver accepts.
    pub const ITERATIVE_EIGEN: usize = 22;
    /// Largest `L` solved by dense eigendecomposition.
    pub const DENSE_EIGEN: usize = 10;
    /// Largest `L` for mixing time computations (they need the full dense
    /// spectrum plus an exhaustive maximum over starting states).
    pub const MIXING: usize = 10;
    /// Largest absorbing-system dimension handled by dense elimination;
    /// larger systems fall through to preconditioned conjugate gradients.
    pub const DENSE_SOLVE_STATES: usize = 2048;
}

/// A numeric result together with how it was obtained and the residual of
/// the defining equation, so reports can carry their own certificates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Solved {
    pub value: f64,
    pub method: &'static str,
    pub residual: f64,
}

impl Solved {
    pub fn new(value: f64, method: &'static str, residual: f64) -> Self {
        Self {
            value,
            method,
            residual,
        }
    }
}
