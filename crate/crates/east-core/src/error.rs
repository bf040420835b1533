use thiserror::Error;

/// Crate wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vacancy density q = {q} outside the admissible interval ({lo}, {hi})")]
    DensityOutOfRange { q: f64, lo: f64, hi: f64 },

    #[error("chain length must be at least 1")]
    EmptyChain,

    #[error("site {site} outside the chain [1, {len}]")]
    SiteOutOfRange { site: usize, len: usize },

    #[error("state id {id} outside the state space of size {space}")]
    StateOutOfRange { id: usize, space: usize },

    #[error("{op} supports L <= {cap}, got L = {len}")]
    LengthCap {
        op: &'static str,
        cap: usize,
        len: usize,
    },

    #[error("target set is {what}")]
    BadTarget { what: &'static str },

    #[error("{solver} did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverStalled {
        solver: &'static str,
        residual: f64,
        iterations: usize,
    },

    #[error("bisection bracket [{lo}, {hi}] does not enclose the level {level}")]
    BracketFailure { lo: f64, hi: f64, level: f64 },

    #[error("certificate check failed: {what} off by {magnitude:.3e}")]
    CertificateFailed { what: &'static str, magnitude: f64 },

    #[error("simulation horizon cap {cap} exceeded before the target was hit")]
    HorizonExceeded { cap: f64 },

    #[error("configuration string must be over {{0,1}}, got {0:?}")]
    BadConfigString(String),

    #[error("{0}")]
    InvalidArgument(String),
}
