//! Analysis toolkit for the East chain: a one dimensional kinetically
//! constrained spin system in which site `x` may refresh only while its left
//! neighbour holds a vacancy. The crate computes the chain's characteristic
//! time scales exactly (spectral gap, mixing, hitting, hitting quantiles),
//! simulates the process through its graphical construction, enumerates the
//! combinatorial bottleneck sets that pin the spectral gap from below, and
//! certifies the electrical network constructions that pin it from above.
//!
//! The core vocabulary ([`model`]) is generic over the scalar type through
//! [`Scalar`]; the solver layers work with the `f64` aliases re-exported at
//! the crate root.

pub mod bottleneck;
mod error;
pub mod exact;
pub mod graphical;
pub mod lab;
mod linalg;
pub mod model;
pub mod network;
mod scalar;

pub use error::{Error, Result};
pub use model::{Configuration, ModelParams};
pub use scalar::Scalar;

/// Model parameters with the concrete scalar used by every solver module.
pub type Params = ModelParams<f64>;

/// A spin flip transition with the concrete scalar used by the solvers.
pub type Transition = model::Transition<f64>;
