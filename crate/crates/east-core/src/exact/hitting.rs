//! Mean hitting times through the absorbing linear system.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, SymOp};
use crate::model::Configuration;
use crate::Params;

use super::generator::Generator;
use super::set::StateSet;
use super::{caps, Solved};

/// Expected hitting time of `target` from `start`.
///
/// Solves `(-G) h = 1` off the target with `h = 0` on it, through the
/// symmetrised positive definite form: dense Cholesky while the absorbing
/// system fits [`caps::DENSE_SOLVE_STATES`], Jacobi preconditioned conjugate
/// gradients beyond.
pub fn mean_hitting_time(
    params: &Params,
    start: Configuration,
    target: &StateSet,
) -> Result<Solved> {
    let gen = Generator::build(params)?;
    mean_hitting_time_of(&gen, start, target)
}

pub fn mean_hitting_time_of(
    gen: &Generator,
    start: Configuration,
    target: &StateSet,
) -> Result<Solved> {
    target.validate_target()?;
    if target.contains(start.id()) {
        return Ok(Solved::new(0.0, "linear-solve", 0.0));
    }
    let ones = vec![1.0; gen.n()];
    let (h, residual, method) = solve_absorbing(gen, target, &ones)?;
    Ok(Solved::new(h[start.id()], method, residual))
}

/// Solve `(-G)|_CC y = rhs|_C` where `C` is the complement of `target`,
/// returning `y` embedded in the full space with zeros on the target, the
/// relative residual of the symmetrised system, and the route taken.
///
/// The symmetrised system `S|_CC (D^{1/2} y) = D^{1/2} rhs` is positive
/// definite because the kernel direction `sqrt(pi)` never vanishes on the
/// removed states.
pub(crate) fn solve_absorbing(
    gen: &Generator,
    target: &StateSet,
    rhs: &[f64],
) -> Result<(Vec<f64>, f64, &'static str)> {
    target.validate_target()?;
    let n = gen.n();
    debug_assert_eq!(rhs.len(), n);
    let b: Vec<f64> = (0..n)
        .map(|i| {
            if target.contains(i) {
                0.0
            } else {
                gen.sqrt_pi()[i] * rhs[i]
            }
        })
        .collect();

    let complement_size = n - target.count();
    let (g, method) = if complement_size <= caps::DENSE_SOLVE_STATES {
        (solve_dense(gen, target, &b)?, "linear-solve")
    } else {
        (solve_pcg(gen, target, &b)?, "linear-solve")
    };

    // Residual of the symmetrised absorbing system.
    let op = MaskedSym { gen, target };
    let mut sg = vec![0.0; n];
    op.apply(&g, &mut sg);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let d = sg[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    let residual = num.sqrt() / den.sqrt().max(f64::MIN_POSITIVE);
    if residual > 1e-10 {
        return Err(Error::SolverStalled {
            solver: "absorbing system",
            residual,
            iterations: 0,
        });
    }

    let y: Vec<f64> = (0..n)
        .map(|i| {
            if target.contains(i) {
                0.0
            } else {
                g[i] / gen.sqrt_pi()[i]
            }
        })
        .collect();
    Ok((y, residual, method))
}

fn solve_dense(gen: &Generator, target: &StateSet, b: &[f64]) -> Result<Vec<f64>> {
    let n = gen.n();
    let complement: Vec<usize> = target.iter_complement().collect();
    let mut index_of = vec![usize::MAX; n];
    for (k, &id) in complement.iter().enumerate() {
        index_of[id] = k;
    }
    let m = complement.len();
    let mut s = DMatrix::<f64>::zeros(m, m);
    let off = -(gen.params().p() * gen.params().q()).sqrt();
    gen.for_each_edge(|a, c, _| {
        if index_of[a] != usize::MAX && index_of[c] != usize::MAX {
            s[(index_of[a], index_of[c])] = off;
        }
    });
    for (k, &id) in complement.iter().enumerate() {
        s[(k, k)] = gen.holding(id);
    }
    let bc: Vec<f64> = complement.iter().map(|&id| b[id]).collect();
    let xc = linalg::dense_spd_solve(s, &bc)?;
    let mut x = vec![0.0; n];
    for (k, &id) in complement.iter().enumerate() {
        x[id] = xc[k];
    }
    Ok(x)
}

fn solve_pcg(gen: &Generator, target: &StateSet, b: &[f64]) -> Result<Vec<f64>> {
    let op = MaskedSym { gen, target };
    let mut x = vec![0.0; gen.n()];
    linalg::pcg(&op, b, &mut x, None, 1e-12, 500_000)?;
    Ok(x)
}

/// The symmetrised generator restricted to the complement of `target`,
/// acting on full-length vectors supported off the target.
pub(crate) struct MaskedSym<'a> {
    pub gen: &'a Generator,
    pub target: &'a StateSet,
}

impl SymOp for MaskedSym<'_> {
    fn dim(&self) -> usize {
        self.gen.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.gen.sym_apply(x, y);
        for (i, v) in y.iter_mut().enumerate() {
            if self.target.contains(i) {
                *v = 0.0;
            }
        }
    }
    fn diag(&self, i: usize) -> f64 {
        if self.target.contains(i) {
            1.0
        } else {
            self.gen.holding(i)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_mean_hitting_is_inverse_rate() {
        // From the vacancy state, the particle appears at rate p.
        let params = Params::new(1, 0.3).unwrap();
        let target = StateSet::spin_is(1, 1, 1);
        let start = Configuration::single_right_vacancy(1);
        let solved = mean_hitting_time(&params, start, &target).unwrap();
        assert!((solved.value - 1.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn dense_and_pcg_agree() {
        let params = Params::new(6, 0.2).unwrap();
        let gen = Generator::build(&params).unwrap();
        let target = StateSet::spin_is(6, 6, 1);
        let ones = vec![1.0; gen.n()];
        let (dense, _, _) = solve_absorbing(&gen, &target, &ones).unwrap();
        let b: Vec<f64> = (0..gen.n())
            .map(|i| {
                if target.contains(i) {
                    0.0
                } else {
                    gen.sqrt_pi()[i]
                }
            })
            .collect();
        let viapcg = solve_pcg(&gen, &target, &b).unwrap();
        for i in 0..gen.n() {
            let want = dense[i] * gen.sqrt_pi()[i];
            assert!((viapcg[i] - want).abs() < 1e-8 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn start_inside_target_hits_immediately() {
        let params = Params::new(3, 0.3).unwrap();
        let target = StateSet::spin_is(3, 3, 1);
        let start = Configuration::all_ones(3);
        let solved = mean_hitting_time(&params, start, &target).unwrap();
        assert_eq!(solved.value, 0.0);
    }
}
