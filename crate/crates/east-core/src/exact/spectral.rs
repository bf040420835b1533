//! Spectral gap and full spectral decompositions of the symmetrised
//! generator.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::Params;

use super::generator::{Generator, SymGenerator};
use super::{caps, Solved};

/// Relaxation time `1 / gap`. Dense eigendecomposition up to
/// [`caps::DENSE_EIGEN`], matrix-free block inverse iteration with the
/// `sqrt(pi)` kernel deflated beyond that.
pub fn relaxation_time(params: &Params) -> Result<Solved> {
    let gen = Generator::build(params)?;
    relaxation_time_of(&gen)
}

pub fn relaxation_time_of(gen: &Generator) -> Result<Solved> {
    let (gap, residual, method) = spectral_gap(gen)?;
    Ok(Solved::new(1.0 / gap, method, residual))
}

/// The smallest nonzero eigenvalue of `S`, its eigen-residual, and the route
/// taken.
pub fn spectral_gap(gen: &Generator) -> Result<(f64, f64, &'static str)> {
    if gen.len() <= caps::DENSE_EIGEN {
        let (gap, residual) = gap_dense(gen)?;
        Ok((gap, residual, "dense-eigen"))
    } else if gen.len() <= caps::ITERATIVE_EIGEN {
        let (gap, residual) = gap_iterative(gen)?;
        Ok((gap, residual, "iterative-eigen"))
    } else {
        Err(Error::LengthCap {
            op: "spectral gap",
            cap: caps::ITERATIVE_EIGEN,
            len: gen.len(),
        })
    }
}

fn gap_dense(gen: &Generator) -> Result<(f64, f64)> {
    let s = gen.dense_symmetrised();
    let (values, vectors) = linalg::dense_sorted_eigen(s.clone());
    if values[0].abs() > 1e-10 {
        return Err(Error::SolverStalled {
            solver: "dense eigendecomposition (kernel eigenvalue)",
            residual: values[0].abs(),
            iterations: 0,
        });
    }
    let gap = values[1];
    let v = vectors.column(1);
    let residual = (&s * v - v * gap).norm();
    Ok((gap, residual))
}

fn gap_iterative(gen: &Generator) -> Result<(f64, f64)> {
    let op = SymGenerator(gen);
    let kernel = gen.kernel_vector();
    let pair = linalg::smallest_deflated_eigenpair(&op, &kernel, 1e-10, 300)?;
    Ok((pair.value, pair.residual))
}

/// Full dense spectral decomposition of `S`, stored in the similarity frame
/// that turns it back into the semigroup: `exp(tG) = U exp(-t Lambda) W`
/// with `U = D^{-1/2} Q` and `W = Q^T D^{1/2}`.
pub struct FullSpectral {
    pub values: Vec<f64>,
    pub u: DMatrix<f64>,
    pub w: DMatrix<f64>,
}

impl FullSpectral {
    pub fn build(gen: &Generator) -> Result<Self> {
        if gen.len() > caps::MIXING {
            return Err(Error::LengthCap {
                op: "full spectral decomposition",
                cap: caps::MIXING,
                len: gen.len(),
            });
        }
        let n = gen.n();
        let (values, q) = linalg::dense_sorted_eigen(gen.dense_symmetrised());
        let mut u = q.clone();
        let mut w = q.transpose();
        for i in 0..n {
            let s = gen.sqrt_pi()[i];
            for j in 0..n {
                u[(i, j)] /= s;
                w[(j, i)] *= s;
            }
        }
        Ok(Self { values, u, w })
    }

    /// Dense `exp(t G)` reconstructed from the decomposition.
    pub fn transition_matrix(&self, t: f64) -> DMatrix<f64> {
        let n = self.values.len();
        let mut scaled = self.u.clone();
        for j in 0..n {
            let decay = (-self.values[j] * t).exp();
            for i in 0..n {
                scaled[(i, j)] *= decay;
            }
        }
        scaled * &self.w
    }

    /// Worst-case total variation distance to equilibrium at time `t`,
    /// maximised exhaustively over all starting states.
    pub fn worst_tv(&self, t: f64, pi: &[f64]) -> f64 {
        let p = self.transition_matrix(t);
        let n = self.values.len();
        let mut worst = 0.0f64;
        for row in 0..n {
            let mut tv = 0.0;
            for col in 0..n {
                tv += (p[(row, col)] - pi[col]).abs();
            }
            worst = worst.max(0.5 * tv);
        }
        worst
    }
}
