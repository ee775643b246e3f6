use super::problem::subtract_product;
use super::{AnalysisError, Problem, ResultField};
use crate::sparse::{norm2, solve_linear_with, CsrMatrix, LinearOptions, SolverError};

/// Residual target of the static solve relative to `‖b‖₂`, reached by
/// correction solves on top of the default CG stopping rule.
const REFINED_TOLERANCE: f64 = 1e-14;
const MAX_CORRECTIONS: usize = 2;

/// CG followed by up to [`MAX_CORRECTIONS`] passes of iterative refinement.
/// Returns the solution and the total CG iteration count.
fn solve_refined(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, usize), SolverError> {
    let options = LinearOptions::default();
    let first = solve_linear_with(a, b, &options)?;
    let (mut x, mut iterations) = (first.x, first.iterations);
    let nb = norm2(b);
    let mut r = vec![0.0; b.len()];
    for _ in 0..MAX_CORRECTIONS {
        a.mul_into(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let nr = norm2(&r);
        if nr == 0.0 || nr <= REFINED_TOLERANCE * nb {
            break;
        }
        // near the rounding floor a correction may stall; x already meets
        // the default tolerance so keep it
        let Ok(correction) = solve_linear_with(a, &r, &options) else {
            break;
        };
        iterations += correction.iterations;
        for (xi, di) in x.iter_mut().zip(&correction.x) {
            *xi += di;
        }
    }
    Ok((x, iterations))
}

/// Solves `K_ff p_f = f_f − K_fc p_c` with the loads and Dirichlet values
/// evaluated at `t = 0`.
pub fn run_static(problem: &Problem) -> Result<ResultField, AnalysisError> {
    solve_static(problem).map(|(field, _)| field)
}

/// [`run_static`] plus the number of CG iterations.
pub fn solve_static(problem: &Problem) -> Result<(ResultField, usize), AnalysisError> {
    if problem.bcs.dirichlet.is_empty() || problem.dofmap.n_dirichlet() == 0 {
        return Err(AnalysisError::StaticWithoutDirichlet);
    }
    let prescribed = problem.prescribed(0.0, 0.0)?;
    let load = problem.load_vector(0.0, 0.0)?;
    let mut rhs = problem.dofmap.restrict_free(&load);
    subtract_product(&mut rhs, &problem.stiffness_blocks.fc, &prescribed, 1.0);
    let (free, iterations) = if rhs.is_empty() {
        (Vec::new(), 0)
    } else {
        solve_refined(&problem.stiffness_blocks.ff, &rhs).map_err(|source| AnalysisError::Solver {
            context: "static solve".into(),
            source,
        })?
    };
    Ok((
        ResultField::pressure(0.0, problem.dofmap.scatter(&free, &prescribed)),
        iterations,
    ))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::analysis::{BcSet, RegionValue};
    use crate::config::Expression;
    use crate::mesh::{generate_grid_mesh, generate_interval_mesh, GridSides};

    fn speeds(name: &str) -> BTreeMap<String, f64> {
        BTreeMap::from([(name.to_string(), 1.0)])
    }

    #[test]
    fn constant_and_ramp() {
        let mesh = generate_interval_mesh(2.0, 8, "d", "L", "R").unwrap();
        let bcs = BcSet {
            dirichlet: vec![
                RegionValue::new("L", Expression::constant(1.0)),
                RegionValue::new("R", Expression::constant(1.0)),
            ],
            ..Default::default()
        };
        let p = Problem::new(&mesh, &["d"], &speeds("d"), bcs).unwrap();
        let field = run_static(&p).unwrap();
        assert!(field.values.iter().all(|v| (v - 1.0).abs() <= 1e-12));

        let bcs = BcSet {
            dirichlet: vec![
                RegionValue::new("L", Expression::constant(0.0)),
                RegionValue::new("R", Expression::constant(1.0)),
            ],
            ..Default::default()
        };
        let p = Problem::new(&mesh, &["d"], &speeds("d"), bcs).unwrap();
        let field = run_static(&p).unwrap();
        for (n, v) in mesh.nodes.iter().zip(&field.values) {
            assert!((v - n.coords[0] / 2.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn linear_patch() {
        let sides = GridSides::new("b", "b", "b", "b");
        let mesh = generate_grid_mesh(1.0, 1.0, 5, 4, "a", &sides).unwrap();
        let bcs = BcSet {
            dirichlet: vec![RegionValue::new("b", Expression::parse("1 + 2*x + 3*y").unwrap())],
            ..Default::default()
        };
        let p = Problem::new(&mesh, &["a"], &speeds("a"), bcs).unwrap();
        let field = run_static(&p).unwrap();
        for (n, v) in mesh.nodes.iter().zip(&field.values) {
            let [x, y, _] = n.coords;
            assert!((v - (1.0 + 2.0 * x + 3.0 * y)).abs() <= 1e-11);
        }
    }

    #[test]
    fn all_constrained_returns_prescribed() {
        let mesh = generate_interval_mesh(1.0, 1, "d", "L", "R").unwrap();
        let bcs = BcSet {
            dirichlet: vec![
                RegionValue::new("L", Expression::constant(2.0)),
                RegionValue::new("R", Expression::constant(3.0)),
            ],
            ..Default::default()
        };
        let p = Problem::new(&mesh, &["d"], &speeds("d"), bcs).unwrap();
        assert_eq!(run_static(&p).unwrap().values, vec![2.0, 3.0]);
    }

    #[test]
    fn requires_dirichlet() {
        let mesh = generate_interval_mesh(1.0, 4, "d", "L", "R").unwrap();
        let p = Problem::new(&mesh, &["d"], &speeds("d"), BcSet::default()).unwrap();
        assert!(matches!(run_static(&p), Err(AnalysisError::StaticWithoutDirichlet)));
    }
}
