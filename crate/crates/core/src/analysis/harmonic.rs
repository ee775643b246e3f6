use rayon::prelude::*;

use super::problem::subtract_product;
use super::{AnalysisError, Problem, ResultField};
use crate::sparse::{solve_linear_with, CsrMatrix, LinearOptions};

/// Solves `(K_ff − ω² M_ff) p̂_f = f_f − (K_fc − ω² M_fc) p̂_c` for every
/// frequency, with data evaluated at `t = 0` and the current `f`.
///
/// Frequencies are independent: a failure (typically a resonance rejected by
/// the direct solver) is reported for that frequency only. Results come back
/// in input order; the sweep runs on the current rayon pool.
pub fn run_harmonic(problem: &Problem, frequencies: &[f64]) -> Vec<Result<ResultField, AnalysisError>> {
    frequencies.par_iter().map(|&f| solve_frequency(problem, f)).collect()
}

fn solve_frequency(problem: &Problem, f: f64) -> Result<ResultField, AnalysisError> {
    let omega2 = (2.0 * std::f64::consts::PI * f).powi(2);
    let kb = &problem.stiffness_blocks;
    let mb = &problem.mass_blocks;
    let prescribed = problem.prescribed(0.0, f)?;
    let load = problem.load_vector(0.0, f)?;
    let mut rhs = problem.dofmap.restrict_free(&load);
    subtract_product(&mut rhs, &kb.fc, &prescribed, 1.0);
    subtract_product(&mut rhs, &mb.fc, &prescribed, -omega2);

    let free = if rhs.is_empty() {
        Vec::new()
    } else {
        let frequency_error = |source| AnalysisError::Frequency { frequency: f, source };
        let a = CsrMatrix::linear_combination(1.0, &kb.ff, -omega2, &mb.ff).map_err(frequency_error)?;
        let options = LinearOptions {
            spd: false,
            ..Default::default()
        };
        let solution = solve_linear_with(&a, &rhs, &options).map_err(frequency_error)?;
        log::debug!(
            "f = {f} Hz: rcond {:.3e}, residual {:.3e}",
            solution.rcond.unwrap_or(f64::NAN),
            solution.residual
        );
        solution.x
    };
    Ok(ResultField::pressure(f, problem.dofmap.scatter(&free, &prescribed)))
}
