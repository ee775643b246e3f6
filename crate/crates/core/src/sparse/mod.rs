//! Sparse matrices, linear solvers and the generalized eigensolver.
//!
//! Symmetric positive definite systems go through Jacobi-preconditioned
//! conjugate gradients. Everything else uses a banded LU factorization with
//! partial pivoting on a reverse Cuthill–McKee ordering; its reciprocal
//! condition estimate is how near-singular (resonant) systems are rejected.

mod cg;
mod csr;
mod dense;
mod eigen;
mod lu;

use thiserror::Error;

pub use cg::{conjugate_gradient, CgOptions};
pub use csr::CsrMatrix;
pub use dense::symmetric_eigen;
pub use eigen::{generalized_eigen_smallest, EigenOptions, EigenPair, EigenSolution};
pub use lu::{reverse_cuthill_mckee, BandLu};

/// Default relative residual target, `‖Ax − b‖ ≤ tol·‖b‖`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Factorizations with a smaller reciprocal condition estimate are treated as
/// singular.
pub const DEFAULT_MIN_RCOND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({nrows} x {ncols})")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("iteration broke down at step {iteration} (relative residual {residual:e})")]
    Breakdown { iteration: usize, residual: f64 },
    #[error("matrix is numerically singular (reciprocal condition estimate {rcond:e})")]
    Singular { rcond: f64 },
    #[error("eigensolver: {0}")]
    Eigen(String),
}

/// How a linear system was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    JacobiCg,
    Cg,
    BandLu,
}

/// Solution of `A x = b` with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    pub method: Method,
    /// CG iterations, or refinement steps for the direct solver.
    pub iterations: usize,
    /// `‖Ax − b‖₂ / ‖b‖₂` (0 for `b = 0`).
    pub residual: f64,
    /// Reciprocal condition estimate (direct solver only).
    pub rcond: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearOptions {
    pub spd: bool,
    pub tolerance: f64,
    pub max_iterations: Option<usize>,
    pub min_rcond: f64,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions {
            spd: true,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: None,
            min_rcond: DEFAULT_MIN_RCOND,
        }
    }
}

/// Solves `A x = b`. With `spd_hint` the system goes to conjugate gradients,
/// otherwise to the banded LU.
pub fn solve_linear(a: &CsrMatrix, b: &[f64], spd_hint: bool) -> Result<Vec<f64>, SolverError> {
    let options = LinearOptions {
        spd: spd_hint,
        ..Default::default()
    };
    solve_linear_with(a, b, &options).map(|s| s.x)
}

pub fn solve_linear_with(a: &CsrMatrix, b: &[f64], options: &LinearOptions) -> Result<LinearSolution, SolverError> {
    check_square(a, b.len())?;
    if options.spd {
        let cg_options = CgOptions {
            tolerance: options.tolerance,
            max_iterations: options.max_iterations.unwrap_or(20 * a.nrows().max(1)),
        };
        conjugate_gradient(a, b, &cg_options)
    } else {
        let lu = BandLu::factor(a)?;
        if lu.rcond() < options.min_rcond {
            return Err(SolverError::Singular { rcond: lu.rcond() });
        }
        lu.solve_refined(a, b, options.tolerance)
    }
}

pub(crate) fn check_square(a: &CsrMatrix, len: usize) -> Result<(), SolverError> {
    if !a.is_square() {
        return Err(SolverError::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    if len != a.nrows() {
        return Err(SolverError::DimensionMismatch {
            expected: a.nrows(),
            found: len,
        });
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `‖A x − b‖₂ / ‖b‖₂`, or `‖A x‖₂` when `b = 0`.
pub(crate) fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut r = vec![0.0; b.len()];
    a.mul_into(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}
