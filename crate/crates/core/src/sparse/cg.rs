use super::{dot, norm2, relative_residual, CsrMatrix, LinearSolution, Method, SolverError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// Conjugate gradients with a Jacobi preconditioner. Falls back to the
/// unpreconditioned iteration when some diagonal entry is not positive.
///
/// Convergence is declared on the true residual `b − Ax`, recomputed whenever
/// the recursive residual drops below the target.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], options: &CgOptions) -> Result<LinearSolution, SolverError> {
    super::check_square(a, b.len())?;
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(LinearSolution {
            x: vec![0.0; n],
            method: Method::JacobiCg,
            iterations: 0,
            residual: 0.0,
            rcond: None,
        });
    }

    let diag = a.diagonal();
    let jacobi = diag.iter().all(|&d| d > 0.0);
    if !jacobi {
        log::debug!("non-positive diagonal entry, using unpreconditioned CG");
    }
    let inv_diag: Vec<f64> = if jacobi {
        diag.iter().map(|d| 1.0 / d).collect()
    } else {
        vec![1.0; n]
    };
    let method = if jacobi { Method::JacobiCg } else { Method::Cg };
    let precondition = |r: &[f64]| -> Vec<f64> { r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect() };

    let target = options.tolerance * bnorm;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for it in 1..=options.max_iterations {
        a.mul_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) || !pap.is_finite() {
            return Err(SolverError::Breakdown {
                iteration: it,
                residual: relative_residual(a, &x, b),
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= target {
            // confirm against the true residual
            a.mul_into(&x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            let true_norm = norm2(&r);
            if true_norm <= target {
                return Ok(LinearSolution {
                    x,
                    method,
                    iterations: it,
                    residual: true_norm / bnorm,
                    rcond: None,
                });
            }
            z = precondition(&r);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        z = precondition(&r);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolverError::NonConvergence {
        iterations: options.max_iterations,
        residual: relative_residual(a, &x, b),
    })
}
