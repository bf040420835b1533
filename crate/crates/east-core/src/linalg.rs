//! Internal linear algebra helpers shared by the exact and network modules.
//!
//! Everything here works against [`SymOp`], a matrix-free symmetric positive
//! semidefinite operator, so the large state spaces never materialise a
//! matrix. Dense paths go through `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Matrix-free symmetric operator.
pub trait SymOp: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Diagonal entry, used for Jacobi preconditioning.
    fn diag(&self, i: usize) -> f64;
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y -= (y . u) u` for a unit vector `u`.
fn project_out(y: &mut [f64], u: &[f64]) {
    let c = dot(y, u);
    for (yi, ui) in y.iter_mut().zip(u) {
        *yi -= c * ui;
    }
}

/// Jacobi preconditioned conjugate gradient for `A x = b`. When `kernel` is
/// given (a unit vector spanning the nullspace of `A`), the solve runs in its
/// orthogonal complement, which keeps the system effectively positive
/// definite.
pub fn pcg(
    op: &dyn SymOp,
    b: &[f64],
    x: &mut [f64],
    kernel: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<()> {
    let n = op.dim();
    debug_assert_eq!(b.len(), n);
    let mut b = b.to_vec();
    if let Some(u) = kernel {
        project_out(&mut b, u);
    }
    let b_norm = norm(&b).max(f64::MIN_POSITIVE);
    let tol = rel_tol * b_norm;

    x.iter_mut().for_each(|v| *v = 0.0);
    let mut r = b.clone();
    let mut z = vec![0.0; n];
    let precondition = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = r[i] / op.diag(i).max(f64::MIN_POSITIVE);
        }
    };
    precondition(&r, &mut z);
    if let Some(u) = kernel {
        project_out(&mut z, u);
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for k in 0..max_iter {
        let r_norm = norm(&r);
        if r_norm <= tol {
            return Ok(());
        }
        op.apply(&p, &mut ap);
        if let Some(u) = kernel {
            project_out(&mut ap, u);
        }
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::SolverStalled {
                solver: "conjugate gradient",
                residual: r_norm / b_norm,
                iterations: k,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precondition(&r, &mut z);
        if let Some(u) = kernel {
            project_out(&mut z, u);
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let r_norm = norm(&r);
    if r_norm <= tol * 10.0 {
        // Close enough that the caller's residual check can decide.
        return Ok(());
    }
    Err(Error::SolverStalled {
        solver: "conjugate gradient",
        residual: r_norm / b_norm,
        iterations: max_iter,
    })
}

pub struct EigenPair {
    pub value: f64,
    /// `||A v - lambda v||_2` with `||v|| = 1`.
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenvalue of `A` restricted to the orthogonal complement of
/// `kernel`, by block inverse iteration with Rayleigh-Ritz extraction. The
/// inner solves run through [`pcg`] with the kernel deflated.
pub fn smallest_deflated_eigenpair(
    op: &dyn SymOp,
    kernel: &[f64],
    tol: f64,
    max_outer: usize,
) -> Result<EigenPair> {
    let n = op.dim();
    let block = 4.min(n.saturating_sub(1)).max(1);
    // Deterministic pseudo-random start block.
    let mut basis: Vec<Vec<f64>> = (0..block)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let s = (i as u64)
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407)
                        .wrapping_add((j as u64).wrapping_mul(0x9e3779b97f4a7c15));
                    let s = s ^ (s >> 33);
                    (s as f64 / u64::MAX as f64) - 0.5
                })
                .collect()
        })
        .collect();
    orthonormalise(&mut basis, kernel)?;

    let mut work = vec![0.0; n];
    let mut best: Option<EigenPair> = None;
    for outer in 1..=max_outer {
        // One inverse power step per block vector.
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(block);
        for b in &basis {
            let mut x = vec![0.0; n];
            pcg(op, b, &mut x, Some(kernel), 1e-12, 200_000)?;
            next.push(x);
        }
        orthonormalise(&mut next, kernel)?;

        // Rayleigh-Ritz on the block.
        let m = next.len();
        let mut h = DMatrix::<f64>::zeros(m, m);
        let mut applied: Vec<Vec<f64>> = Vec::with_capacity(m);
        for v in &next {
            op.apply(v, &mut work);
            applied.push(work.clone());
        }
        for i in 0..m {
            for j in 0..m {
                h[(i, j)] = dot(&next[i], &applied[j]);
            }
        }
        h = (h.clone() + h.transpose()) * 0.5;
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lead = order[0];
        let value = eig.eigenvalues[lead];
        let mut vector = vec![0.0; n];
        for (j, b) in next.iter().enumerate() {
            let c = eig.eigenvectors[(j, lead)];
            for i in 0..n {
                vector[i] += c * b[i];
            }
        }
        let nv = norm(&vector);
        vector.iter_mut().for_each(|v| *v /= nv);
        op.apply(&vector, &mut work);
        let mut residual = 0.0;
        for i in 0..n {
            let d = work[i] - value * vector[i];
            residual += d * d;
        }
        let residual = residual.sqrt();
        if residual < tol {
            return Ok(EigenPair {
                value,
                residual,
                iterations: outer,
            });
        }
        best = Some(EigenPair {
            value,
            residual,
            iterations: outer,
        });
        // Rotate the basis to the Ritz ordering for the next sweep.
        let mut rotated: Vec<Vec<f64>> = Vec::with_capacity(m);
        for &k in &order {
            let mut v = vec![0.0; n];
            for (j, b) in next.iter().enumerate() {
                let c = eig.eigenvectors[(j, k)];
                for i in 0..n {
                    v[i] += c * b[i];
                }
            }
            rotated.push(v);
        }
        basis = rotated;
    }
    let best = best.unwrap();
    Err(Error::SolverStalled {
        solver: "block inverse iteration",
        residual: best.residual,
        iterations: best.iterations,
    })
}

/// Modified Gram-Schmidt against `kernel` and within the block; drops vectors
/// that collapse numerically.
fn orthonormalise(basis: &mut Vec<Vec<f64>>, kernel: &[f64]) -> Result<()> {
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for mut v in basis.drain(..) {
        for _ in 0..2 {
            project_out(&mut v, kernel);
            for u in &kept {
                project_out(&mut v, u);
            }
        }
        let nv = norm(&v);
        if nv > 1e-12 {
            v.iter_mut().for_each(|x| *x /= nv);
            kept.push(v);
        }
    }
    if kept.is_empty() {
        return Err(Error::SolverStalled {
            solver: "block orthonormalisation",
            residual: f64::NAN,
            iterations: 0,
        });
    }
    *basis = kept;
    Ok(())
}

/// Dense symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn dense_sorted_eigen(mat: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = mat.nrows();
    let eig = mat.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Solve the dense SPD system `A x = b` by Cholesky.
pub fn dense_spd_solve(mat: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let chol = mat.cholesky().ok_or(Error::SolverStalled {
        solver: "cholesky",
        residual: f64::NAN,
        iterations: 0,
    })?;
    let x = chol.solve(&DVector::from_column_slice(b));
    Ok(x.data.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct DenseOp(DMatrix<f64>);
    impl SymOp for DenseOp {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let v = &self.0 * DVector::from_column_slice(x);
            y.copy_from_slice(v.as_slice());
        }
        fn diag(&self, i: usize) -> f64 {
            self.0[(i, i)]
        }
    }

    fn laplacian_path(n: usize) -> DMatrix<f64> {
        // Path graph Laplacian: kernel is the constant vector, smallest
        // nonzero eigenvalue 2(1 - cos(pi/n)).
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i)] += 1.0;
            m[(i + 1, i + 1)] += 1.0;
            m[(i, i + 1)] -= 1.0;
            m[(i + 1, i)] -= 1.0;
        }
        m
    }

    #[test]
    fn pcg_solves_spd_system() {
        let n = 40;
        let mut m = laplacian_path(n);
        for i in 0..n {
            m[(i, i)] += 0.7;
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let op = DenseOp(m.clone());
        let mut x = vec![0.0; n];
        pcg(&op, &b, &mut x, None, 1e-13, 10_000).unwrap();
        let r = &m * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
        assert!(r.norm() < 1e-10);
    }

    #[test]
    fn deflated_eigenpair_matches_closed_form() {
        let n = 24;
        let op = DenseOp(laplacian_path(n));
        let kernel: Vec<f64> = vec![1.0 / (n as f64).sqrt(); n];
        let pair = smallest_deflated_eigenpair(&op, &kernel, 1e-10, 60).unwrap();
        let expect = 2.0 * (1.0 - (std::f64::consts::PI / n as f64).cos());
        assert!(
            (pair.value - expect).abs() < 1e-10,
            "got {} want {}",
            pair.value,
            expect
        );
        assert!(pair.residual < 1e-10);
    }

    #[test]
    fn dense_eigen_sorted() {
        let (vals, _) = dense_sorted_eigen(laplacian_path(8));
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-14);
        }
        assert!(vals[0].abs() < 1e-12);
    }
}
