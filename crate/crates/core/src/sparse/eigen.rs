use super::dense::symmetric_eigen;
use super::{dot, norm2, BandLu, CsrMatrix, SolverError, DEFAULT_MIN_RCOND};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub shift: f64,
    /// Relative residual target for each pair.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Below this reciprocal condition estimate `K − σM` counts as singular.
    pub min_rcond: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            shift: 0.0,
            tolerance: 1e-8,
            max_iterations: 500,
            min_rcond: DEFAULT_MIN_RCOND,
        }
    }
}

/// `K v = λ M v` with `vᵀ M v = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    /// Ascending in `lambda`.
    pub pairs: Vec<EigenPair>,
    /// Shift actually used for the factorization.
    pub shift: f64,
    pub iterations: usize,
}

/// The `count` eigenpairs of `K v = λ M v` closest to the shift, by
/// shift-invert subspace iteration with Rayleigh–Ritz projection.
///
/// `K − σM` is factored once. If it is numerically singular the shift is
/// moved once by `(tr K / tr M)·1e-6 + 1e-12` and the factorization retried.
///
/// Each returned vector is M-normalized and signed so that its entry of
/// largest magnitude (first one on ties) is positive.
pub fn generalized_eigen_smallest(
    k: &CsrMatrix,
    m: &CsrMatrix,
    count: usize,
    options: &EigenOptions,
) -> Result<EigenSolution, SolverError> {
    super::check_square(k, m.nrows())?;
    super::check_square(m, k.nrows())?;
    let n = k.nrows();
    if count > n {
        return Err(SolverError::Eigen(format!(
            "{count} eigenpairs requested but the system has only {n} unknowns"
        )));
    }
    if count == 0 {
        return Ok(EigenSolution {
            pairs: Vec::new(),
            shift: options.shift,
            iterations: 0,
        });
    }

    let (lu, shift) = factor_shifted(k, m, options)?;
    let p = n.min((2 * count).max(count + 8));
    let norm_k = k.norm_1();
    let norm_m = m.norm_1();

    let mut fresh = 0;
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            fresh += 1;
            start_vector(n, fresh - 1)
        })
        .collect();
    let mut mx = vec![0.0; n];
    let mut kx = vec![0.0; n];

    for iteration in 1..=options.max_iterations {
        let mut y: Vec<Vec<f64>> = x
            .iter()
            .map(|xj| {
                m.mul_into(xj, &mut mx);
                lu.solve(&mx)
            })
            .collect();
        m_orthonormalize(&mut y, m, &mut fresh)?;

        let ky: Vec<Vec<f64>> = y
            .iter()
            .map(|yj| {
                let mut out = vec![0.0; n];
                k.mul_into(yj, &mut out);
                out
            })
            .collect();
        let mut reduced = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in i..p {
                let v = 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i]));
                reduced[i][j] = v;
                reduced[j][i] = v;
            }
        }
        let (theta, q) = symmetric_eigen(&reduced);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            (theta[a] - shift)
                .abs()
                .total_cmp(&(theta[b] - shift).abs())
                .then(a.cmp(&b))
        });

        x = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (j, yj) in y.iter().enumerate() {
                    let w = q[j][c];
                    for (vi, yi) in v.iter_mut().zip(yj) {
                        *vi += w * yi;
                    }
                }
                v
            })
            .collect();

        let converged = order.iter().take(count).zip(&x).all(|(&c, v)| {
            let lambda = theta[c];
            k.mul_into(v, &mut kx);
            m.mul_into(v, &mut mx);
            let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
            let res = norm2(&r);
            res <= options.tolerance * norm2(&kx).max(lambda.abs() * norm2(&mx))
                || res <= 1e-12 * (norm_k + lambda.abs() * norm_m) * norm2(v)
        });

        if converged {
            let mut pairs: Vec<EigenPair> = order
                .iter()
                .take(count)
                .zip(x)
                .map(|(&c, mut vector)| {
                    m.mul_into(&vector, &mut mx);
                    let scale = 1.0 / dot(&vector, &mx).sqrt();
                    let big = vector
                        .iter()
                        .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { *v } else { acc });
                    let scale = if big < 0.0 { -scale } else { scale };
                    vector.iter_mut().for_each(|v| *v *= scale);
                    EigenPair {
                        lambda: theta[c],
                        vector,
                    }
                })
                .collect();
            pairs.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
            return Ok(EigenSolution {
                pairs,
                shift,
                iterations: iteration,
            });
        }
    }
    Err(SolverError::Eigen(format!(
        "subspace iteration did not converge in {} iterations",
        options.max_iterations
    )))
}

fn factor_shifted(k: &CsrMatrix, m: &CsrMatrix, options: &EigenOptions) -> Result<(BandLu, f64), SolverError> {
    let try_shift = |sigma: f64| -> Result<BandLu, SolverError> {
        let a = CsrMatrix::linear_combination(1.0, k, -sigma, m)?;
        let lu = BandLu::factor(&a)?;
        if lu.rcond() < options.min_rcond {
            return Err(SolverError::Singular { rcond: lu.rcond() });
        }
        Ok(lu)
    };
    match try_shift(options.shift) {
        Ok(lu) => Ok((lu, options.shift)),
        Err(SolverError::Singular { rcond }) => {
            let tau = -(k.trace() / m.trace()) * 1e-6 - 1e-12;
            let retry = options.shift - tau;
            log::debug!(
                "K - {}M is singular (rcond {rcond:e}), retrying with shift {retry:e}",
                options.shift
            );
            match try_shift(retry) {
                Ok(lu) => Ok((lu, retry)),
                Err(SolverError::Singular { rcond }) => Err(SolverError::Eigen(format!(
                    "K - sigma M is singular for sigma = {} and sigma = {retry:e} (rcond {rcond:e})",
                    options.shift
                ))),
                Err(e) => Err(e),
            }
        }
        Err(e) => Err(e),
    }
}

/// Deterministic, well-spread start vector: a Weyl sequence with a slope
/// that differs per column.
fn start_vector(n: usize, column: usize) -> Vec<f64> {
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    let slope = golden + column as f64 * std::f64::consts::SQRT_2;
    (0..n).map(|i| 0.5 + ((i + 1) as f64 * slope).fract()).collect()
}

/// Modified Gram–Schmidt in the M inner product, applied twice. A column
/// that collapses is replaced by a fresh start vector.
fn m_orthonormalize(y: &mut [Vec<f64>], m: &CsrMatrix, fresh: &mut usize) -> Result<(), SolverError> {
    let n = m.nrows();
    let mut mv = vec![vec![0.0; n]; y.len()];
    for j in 0..y.len() {
        let mut attempts = 0;
        loop {
            let mut tmp = vec![0.0; n];
            m.mul_into(&y[j], &mut tmp);
            let before = dot(&y[j], &tmp).sqrt();
            for _pass in 0..2 {
                for i in 0..j {
                    let c = dot(&mv[i], &y[j]);
                    let (head, tail) = y.split_at_mut(j);
                    for (a, b) in tail[0].iter_mut().zip(&head[i]) {
                        *a -= c * b;
                    }
                }
            }
            m.mul_into(&y[j], &mut tmp);
            let after = dot(&y[j], &tmp).sqrt();
            if after > 1e-10 * before && after.is_finite() && after > 0.0 {
                y[j].iter_mut().for_each(|v| *v /= after);
                mv[j] = tmp.iter().map(|v| v / after).collect();
                break;
            }
            attempts += 1;
            if attempts > 10 {
                return Err(SolverError::Eigen("could not build an M-orthonormal basis".into()));
            }
            y[j] = start_vector(n, *fresh);
            *fresh += 1;
        }
    }
    Ok(())
}
