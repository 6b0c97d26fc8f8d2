//! Small dense and banded kernels used by the solvers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigendecomposition A = Q Λ Qᵀ of a small symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub vectors: DMatrix<f64>,
}

impl SymEig {
    pub fn new(a: DMatrix<f64>) -> Self {
        let e = SymmetricEigen::new(a);
        Self { values: e.eigenvalues.iter().copied().collect(), vectors: e.eigenvectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off` (len n−1).
pub fn tridiag_matrix(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
    let n = diag.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = diag[i];
        if i + 1 < n {
            a[(i, i + 1)] = off[i];
            a[(i + 1, i)] = off[i];
        }
    }
    a
}

/// Solves a symmetric positive definite tridiagonal system in place (Thomas algorithm).
pub fn tridiag_solve(diag: &[f64], off: &[f64], rhs: &mut [f64], work: &mut Vec<f64>) {
    let n = diag.len();
    work.clear();
    work.resize(n, 0.0);
    let mut denom = diag[0];
    rhs[0] /= denom;
    for i in 1..n {
        work[i] = off[i - 1] / denom;
        denom = diag[i] - off[i - 1] * work[i];
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= work[i + 1] * rhs[i + 1];
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradients for an SPD operator.
///
/// Stops when ‖r‖ ≤ tol·‖b‖; returns the relative residual reached.
pub fn pcg(
    apply: impl Fn(&[f64], &mut [f64]),
    precond: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
    stage: &'static str,
) -> Result<f64> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0.0);
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut rel = dot(&r, &r).sqrt() / bnorm;
    for _ in 0..max_iter {
        if rel <= tol {
            return Ok(rel);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::SolverDiverged { stage, residual: rel });
        }
        let a = rz / pap;
        for i in 0..n {
            x[i] += a * p[i];
            r[i] -= a * ap[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if rel <= tol {
        Ok(rel)
    } else {
        Err(Error::SolverDiverged { stage, residual: rel })
    }
}
