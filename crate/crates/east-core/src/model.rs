//! Vocabulary of the East chain on `[1, L]`.
//!
//! A configuration assigns a spin in `{0, 1}` to each site; site 0 is not
//! part of the chain but acts as a frozen vacancy, so site 1 is always free
//! to flip. Site `x > 1` may flip only while site `x - 1` holds a vacancy.
//! Flips are heat bath moves: a spin refreshes to 1 with probability
//! `p = 1 - q` and to 0 with probability `q`, making the product Bernoulli
//! measure with vacancy density `q` reversible.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Chain length together with the equilibrium vacancy density `q`.
///
/// The physically interesting regime is `0 < q < 1/2` and the standard
/// constructor enforces it; [`ModelParams::new_wide`] admits any
/// `q` in `(0, 1)` for exploratory runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<F> {
    len: usize,
    q: F,
    p: F,
}

impl<F: Scalar> ModelParams<F> {
    pub fn new(len: usize, q: F) -> Result<Self> {
        let half = F::from_f64(0.5).unwrap();
        if !(q > F::zero() && q < half) {
            return Err(Error::DensityOutOfRange {
                q: q.to_f64().unwrap_or(f64::NAN),
                lo: 0.0,
                hi: 0.5,
            });
        }
        Self::build(len, q)
    }

    /// Admits the full ergodic range `0 < q < 1`.
    pub fn new_wide(len: usize, q: F) -> Result<Self> {
        if !(q > F::zero() && q < F::one()) {
            return Err(Error::DensityOutOfRange {
                q: q.to_f64().unwrap_or(f64::NAN),
                lo: 0.0,
                hi: 1.0,
            });
        }
        Self::build(len, q)
    }

    fn build(len: usize, q: F) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyChain);
        }
        Ok(Self {
            len,
            q,
            p: F::one() - q,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Equilibrium vacancy density.
    pub fn q(&self) -> F {
        self.q
    }

    /// Equilibrium particle density `1 - q`.
    pub fn p(&self) -> F {
        self.p
    }

    /// Number of states `2^L`.
    pub fn state_count(&self) -> usize {
        1usize << self.len
    }

    /// `ceil(log2 L)`, the vacancy budget that controls the bottleneck
    /// combinatorics at this length.
    pub fn ceil_log2(&self) -> usize {
        ceil_log2(self.len)
    }

    /// Same length and density, different scalar type.
    pub fn convert<G: Scalar>(&self) -> ModelParams<G> {
        ModelParams {
            len: self.len,
            q: G::from_f64(self.q.to_f64().unwrap()).unwrap(),
            p: G::from_f64(self.p.to_f64().unwrap()).unwrap(),
        }
    }
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// A spin configuration on `[1, L]`, stored with the spin of site `x` in bit
/// `x - 1` of `bits`. The numeric state id is exactly `bits`, so id 0 is the
/// all vacancy state and id `2^L - 1` is the all particle state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    bits: u32,
    len: u8,
}

impl Configuration {
    /// Decode a state id.
    pub fn from_id(id: usize, len: usize) -> Result<Self> {
        if len == 0 || len > 32 {
            return Err(Error::EmptyChain);
        }
        let space = 1usize << len;
        if id >= space {
            return Err(Error::StateOutOfRange { id, space });
        }
        Ok(Self {
            bits: id as u32,
            len: len as u8,
        })
    }

    /// Parse a string such as `"0110"`, site 1 first.
    pub fn from_str_spins(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 32 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::BadConfigString(s.to_string()));
        }
        let mut bits = 0u32;
        for (i, b) in s.bytes().enumerate() {
            if b == b'1' {
                bits |= 1 << i;
            }
        }
        Ok(Self {
            bits,
            len: s.len() as u8,
        })
    }

    /// All spins equal to 1.
    pub fn all_ones(len: usize) -> Self {
        debug_assert!((1..=32).contains(&len));
        Self {
            bits: if len == 32 {
                u32::MAX
            } else {
                (1u32 << len) - 1
            },
            len: len as u8,
        }
    }

    /// All spins 1 except a single vacancy at site `L`.
    pub fn single_right_vacancy(len: usize) -> Self {
        let mut c = Self::all_ones(len);
        c.bits &= !(1 << (len - 1));
        c
    }

    /// Encode to the numeric state id.
    pub fn id(&self) -> usize {
        self.bits as usize
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spin at site `x`; site 0 reports the frozen vacancy.
    pub fn spin(&self, x: usize) -> u8 {
        debug_assert!(x <= self.len());
        if x == 0 {
            0
        } else {
            ((self.bits >> (x - 1)) & 1) as u8
        }
    }

    /// True when site `x` holds a vacancy. Site 0 always does.
    pub fn is_vacant(&self, x: usize) -> bool {
        self.spin(x) == 0
    }

    /// Kinetic constraint at site `x`: site 1 is unconstrained, any other
    /// site needs a vacancy on its left neighbour.
    pub fn constraint(&self, x: usize) -> bool {
        debug_assert!(x >= 1 && x <= self.len());
        x == 1 || self.is_vacant(x - 1)
    }

    /// Distance from `x` to the nearest vacancy strictly to its left,
    /// counting the frozen vacancy at site 0; always in `[1, x]`.
    pub fn gap(&self, x: usize) -> usize {
        debug_assert!(x >= 1 && x <= self.len());
        // Vacancies among sites [1, x-1] are zero bits below position x-1;
        // the frozen origin catches the all-ones case.
        let mask = (1u32 << (x - 1)).wrapping_sub(1);
        let vacancies_below = !self.bits & mask;
        if vacancies_below == 0 {
            x
        } else {
            x - 1 - (31 - vacancies_below.leading_zeros()) as usize
        }
    }

    /// The configuration with the spin at site `x` flipped.
    pub fn flipped(&self, x: usize) -> Self {
        debug_assert!(x >= 1 && x <= self.len());
        Self {
            bits: self.bits ^ (1 << (x - 1)),
            len: self.len,
        }
    }

    /// The configuration with the spin at site `x` forced to `spin`.
    pub fn with_spin(&self, x: usize, spin: u8) -> Self {
        debug_assert!(x >= 1 && x <= self.len());
        let mask = 1u32 << (x - 1);
        Self {
            bits: if spin == 1 {
                self.bits | mask
            } else {
                self.bits & !mask
            },
            len: self.len,
        }
    }

    /// Number of vacancies in `[1, L]`.
    pub fn vacancy_count(&self) -> usize {
        self.len() - self.bits.count_ones() as usize
    }

    /// Sites in `[1, L]` holding a vacancy, in increasing order.
    pub fn vacancies(&self) -> impl Iterator<Item = usize> + '_ {
        let len = self.len();
        (1..=len).filter(move |&x| self.is_vacant(x))
    }

    /// All configurations of the given length, in state id order.
    pub fn enumerate(len: usize) -> impl Iterator<Item = Configuration> {
        debug_assert!((1..=32).contains(&len));
        (0..1usize << len).map(move |id| Configuration {
            bits: id as u32,
            len: len as u8,
        })
    }

    /// `"[0]0110"`: the frozen vacancy followed by the chain spins.
    pub fn display_verbose(&self) -> String {
        format!("[0]{self}")
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 1..=self.len() {
            write!(f, "{}", self.spin(x))?;
        }
        Ok(())
    }
}

/// Equilibrium weight `q^(#vacancies) * p^(#particles)`.
pub fn weight<F: Scalar>(cfg: Configuration, params: &ModelParams<F>) -> F {
    debug_assert_eq!(cfg.len(), params.len());
    let zeros = cfg.vacancy_count();
    let ones = params.len() - zeros;
    params.q().powi(zeros as i32) * params.p().powi(ones as i32)
}

/// One admissible heat bath move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition<F> {
    pub site: usize,
    pub from: Configuration,
    pub to: Configuration,
    pub rate: F,
}

/// Every legal flip out of `cfg`: removing a particle carries rate `q`,
/// filling a vacancy carries rate `p`.
pub fn transitions<F: Scalar>(
    cfg: Configuration,
    params: &ModelParams<F>,
) -> Vec<Transition<F>> {
    debug_assert_eq!(cfg.len(), params.len());
    let mut out = Vec::new();
    for x in 1..=params.len() {
        if !cfg.constraint(x) {
            continue;
        }
        let rate = if cfg.spin(x) == 1 {
            params.q()
        } else {
            params.p()
        };
        out.push(Transition {
            site: x,
            from: cfg,
            to: cfg.flipped(x),
            rate,
        });
    }
    out
}
