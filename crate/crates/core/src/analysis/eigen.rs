use super::{AnalysisError, Problem, ResultField};
use crate::sparse::{generalized_eigen_smallest, EigenOptions};

/// One eigenmode. `field` holds the M-normalized mode shape with zeros at
/// Dirichlet nodes; its `time_or_freq` is the frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenMode {
    pub lambda: f64,
    /// `√λ / 2π` in Hz.
    pub frequency: f64,
    pub field: ResultField,
}

/// The `modes` lowest modes of `K_ff v = λ M_ff v` (or those nearest the
/// shift). Eigenvalues with `|λ| ≤ 1e-9·λ_scale` are reported as exactly 0,
/// where `λ_scale` is the larger of the biggest computed eigenvalue and
/// `tr K_ff / tr M_ff`.
pub fn run_eigenfrequency(
    problem: &Problem,
    modes: usize,
    shift: Option<f64>,
) -> Result<Vec<EigenMode>, AnalysisError> {
    solve_eigenfrequency(problem, modes, shift).map(|(modes, _)| modes)
}

/// [`run_eigenfrequency`] plus the number of subspace iterations.
pub fn solve_eigenfrequency(
    problem: &Problem,
    modes: usize,
    shift: Option<f64>,
) -> Result<(Vec<EigenMode>, usize), AnalysisError> {
    let k = &problem.stiffness_blocks.ff;
    let m = &problem.mass_blocks.ff;
    let options = EigenOptions {
        shift: shift.unwrap_or(0.0),
        ..Default::default()
    };
    let solution = generalized_eigen_smallest(k, m, modes, &options).map_err(|source| AnalysisError::Solver {
        context: "eigenfrequency solve".into(),
        source,
    })?;
    log::debug!(
        "eigensolver: {} iterations, shift {:e}",
        solution.iterations,
        solution.shift
    );

    let largest = solution.pairs.iter().map(|p| p.lambda.abs()).fold(0.0, f64::max);
    let scale = largest.max(k.trace() / m.trace());
    let zeros = vec![0.0; problem.dofmap.n_dirichlet()];
    let iterations = solution.iterations;
    let modes = solution
        .pairs
        .into_iter()
        .map(|pair| {
            let lambda = if pair.lambda.abs() <= 1e-9 * scale {
                0.0
            } else {
                pair.lambda
            };
            let frequency = lambda.max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
            EigenMode {
                lambda,
                frequency,
                field: ResultField::pressure(frequency, problem.dofmap.scatter(&pair.vector, &zeros)),
            }
        })
        .collect();
    Ok((modes, iterations))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::analysis::{BcSet, RegionValue};
    use crate::config::Expression;
    use crate::mesh::generate_interval_mesh;

    #[test]
    fn neumann_duct() {
        let mesh = generate_interval_mesh(1.0, 100, "d", "L", "R").unwrap();
        let speeds = BTreeMap::from([("d".to_string(), 1.0)]);
        let p = Problem::new(&mesh, &["d"], &speeds, BcSet::default()).unwrap();
        let modes = run_eigenfrequency(&p, 3, None).unwrap();
        assert_eq!(modes[0].frequency, 0.0);
        assert!((modes[1].frequency - 0.5).abs() / 0.5 <= 1e-3);
        assert!((modes[2].frequency - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn dirichlet_duct_mode_shape() {
        let mesh = generate_interval_mesh(1.0, 100, "d", "L", "R").unwrap();
        let speeds = BTreeMap::from([("d".to_string(), 1.0)]);
        let bcs = BcSet {
            dirichlet: vec![
                RegionValue::new("L", Expression::zero()),
                RegionValue::new("R", Expression::zero()),
            ],
            ..Default::default()
        };
        let p = Problem::new(&mesh, &["d"], &speeds, bcs).unwrap();
        let modes = run_eigenfrequency(&p, 2, None).unwrap();
        assert!((modes[0].frequency - 0.5).abs() / 0.5 <= 1e-3);
        let v = &modes[0].field.values;
        assert_eq!(v[0], 0.0);
        assert_eq!(v[100], 0.0);
        // M-normalized sin(πx) has amplitude √2
        for (n, value) in mesh.nodes.iter().zip(v) {
            let want = 2f64.sqrt() * (std::f64::consts::PI * n.coords[0]).sin();
            assert!((value - want).abs() < 1e-3);
        }
    }

    #[test]
    fn frequencies_scale_with_speed() {
        let mesh = generate_interval_mesh(1.0, 30, "d", "L", "R").unwrap();
        let run = |c: f64| {
            let speeds = BTreeMap::from([("d".to_string(), c)]);
            let p = Problem::new(&mesh, &["d"], &speeds, BcSet::default()).unwrap();
            run_eigenfrequency(&p, 4, None).unwrap()
        };
        let (a, b) = (run(1.0), run(2.0));
        for (x, y) in a.iter().zip(&b) {
            if x.frequency == 0.0 {
                assert_eq!(y.frequency, 0.0);
            } else {
                assert!((y.frequency / x.frequency - 2.0).abs() <= 1e-9);
            }
        }
    }
}
