//! The graphical construction of the chain: independent rate-one ring clocks
//! and coin streams per site, shared by every initial condition. Everything
//! in this module is a pure function of `(seed, params, horizon)`.

mod coupling;
mod hitting;
mod noise;
mod trajectory;
mod zero;

pub use coupling::{couple_all, couple_all_adaptive, first_legal_rings, CouplingReport};
pub use hitting::{hitting_mean, sample_hitting, sample_hitting_widening, HitSample, DEFAULT_CAP};
pub use noise::NoiseField;
pub use trajectory::{evolve, evolve_thinned, Event, Trajectory};
pub use zero::{distinguished_zero, ZeroPath};

#[cfg(test)]
pub(crate) use noise::stream_rng;

/// Largest chain length whose full ensemble of `2^L` initial conditions the
/// coupling replay will enumerate.
pub const COUPLING_CAP: usize = 12;
