use super::problem::subtract_product;
use super::{AnalysisError, InitialConditions, Problem, ResultField, TransientSpec};
use crate::sparse::{dot, BandLu, CsrMatrix, SolverError};

/// Tolerance of the linear solves inside the time loop.
const STEP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TransientOutput {
    /// `t_n = n·Δt` for `n = 0..=n_steps`.
    pub times: Vec<f64>,
    /// Fields at every `save_every`-th step, starting with `t = 0`.
    pub snapshots: Vec<(usize, ResultField)>,
    /// `probes[i][n]`: pressure at probe node `i` and time `t_n`.
    pub probes: Vec<Vec<f64>>,
    /// `E_n = ½ vᵀ M v + ½ pᵀ K p` on the full node vectors.
    pub energy: Vec<f64>,
}

/// Newmark time stepping of `M p̈ + K p = f`.
///
/// Dirichlet nodes follow `p_D(t)` exactly; their velocity and acceleration
/// come from finite differences of `p_D` (centred, one-sided at `t = 0`).
/// `save_every = 0` stores no snapshots.
pub fn run_transient_newmark(
    problem: &Problem,
    spec: &TransientSpec,
    ics: &InitialConditions,
    save_every: usize,
    probe_nodes: &[usize],
) -> Result<TransientOutput, AnalysisError> {
    super::AnalysisSpec::Transient(spec.clone()).validate()?;
    let dofmap = &problem.dofmap;
    let (dt, beta, gamma) = (spec.dt, spec.beta, spec.gamma);
    let time = |n: usize| n as f64 * dt;
    let has_dirichlet = dofmap.n_dirichlet() > 0;

    let g = |t: f64| problem.prescribed(t, 0.0);
    let boundary_rates = |n: usize| -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
        if !has_dirichlet {
            return Ok((Vec::new(), Vec::new()));
        }
        let t = time(n);
        if n == 0 {
            let (g0, g1, g2, g3) = (g(t)?, g(t + dt)?, g(t + 2.0 * dt)?, g(t + 3.0 * dt)?);
            let v = (0..g0.len())
                .map(|i| (-3.0 * g0[i] + 4.0 * g1[i] - g2[i]) / (2.0 * dt))
                .collect();
            let a = (0..g0.len())
                .map(|i| (2.0 * g0[i] - 5.0 * g1[i] + 4.0 * g2[i] - g3[i]) / (dt * dt))
                .collect();
            Ok((v, a))
        } else {
            let (gm, g0, gp) = (g(t - dt)?, g(t)?, g(t + dt)?);
            let v = (0..g0.len()).map(|i| (gp[i] - gm[i]) / (2.0 * dt)).collect();
            let a = (0..g0.len())
                .map(|i| (gp[i] - 2.0 * g0[i] + gm[i]) / (dt * dt))
                .collect();
            Ok((v, a))
        }
    };

    let mut p_full = problem.initial_values(&ics.p0, "initial pressure")?;
    let mut v_full = problem.initial_values(&ics.dp0, "initial pressure rate")?;
    let mut pc = g(0.0)?;
    let (mut vc, mut ac) = boundary_rates(0)?;
    let mut pf = dofmap.restrict_free(&p_full);
    let mut vf = dofmap.restrict_free(&v_full);
    p_full = dofmap.scatter(&pf, &pc);
    v_full = dofmap.scatter(&vf, &vc);

    let kb = &problem.stiffness_blocks;
    let mb = &problem.mass_blocks;
    let nf = dofmap.n_free();

    // right-hand side of the free equations without the inertia/stiffness
    // terms of the free unknowns
    let reduced_rhs = |t: f64, pc: &[f64], ac: &[f64]| -> Result<Vec<f64>, AnalysisError> {
        let load = problem.load_vector(t, 0.0)?;
        let mut rhs = dofmap.restrict_free(&load);
        subtract_product(&mut rhs, &kb.fc, pc, 1.0);
        subtract_product(&mut rhs, &mb.fc, ac, 1.0);
        Ok(rhs)
    };
    let step_error = |step: usize, source: SolverError| AnalysisError::TimeStep {
        step,
        time: time(step),
        source,
    };

    let mut af = vec![0.0; nf];
    let mut effective: Option<(CsrMatrix, BandLu)> = None;
    if nf > 0 {
        let mut rhs = reduced_rhs(0.0, &pc, &ac)?;
        subtract_product(&mut rhs, &kb.ff, &pf, 1.0);
        let mass_lu = BandLu::factor(&mb.ff).map_err(|e| step_error(0, e))?;
        af = mass_lu
            .solve_refined(&mb.ff, &rhs, STEP_TOLERANCE)
            .map_err(|e| step_error(0, e))?
            .x;
        let m_eff = CsrMatrix::linear_combination(1.0, &mb.ff, beta * dt * dt, &kb.ff).map_err(|e| step_error(0, e))?;
        let lu = BandLu::factor(&m_eff).map_err(|e| step_error(0, e))?;
        effective = Some((m_eff, lu));
    }

    let energy_of = |p: &[f64], v: &[f64]| -> f64 {
        let mut mv = vec![0.0; v.len()];
        problem.mass.mul_into(v, &mut mv);
        let mut kp = vec![0.0; p.len()];
        problem.stiffness.mul_into(p, &mut kp);
        0.5 * dot(v, &mv) + 0.5 * dot(p, &kp)
    };

    let mut out = TransientOutput {
        times: vec![0.0],
        snapshots: Vec::new(),
        probes: probe_nodes.iter().map(|&n| vec![p_full[n]]).collect(),
        energy: vec![energy_of(&p_full, &v_full)],
    };
    if save_every > 0 {
        out.snapshots.push((0, ResultField::pressure(0.0, p_full.clone())));
    }

    for n in 1..=spec.n_steps {
        let t = time(n);
        pc = g(t)?;
        (vc, ac) = boundary_rates(n)?;
        if let Some((m_eff, lu)) = &effective {
            let predictor: Vec<f64> = (0..nf)
                .map(|i| pf[i] + dt * vf[i] + dt * dt * (0.5 - beta) * af[i])
                .collect();
            let mut rhs = reduced_rhs(t, &pc, &ac)?;
            subtract_product(&mut rhs, &kb.ff, &predictor, 1.0);
            let a_next = lu
                .solve_refined(m_eff, &rhs, STEP_TOLERANCE)
                .map_err(|e| step_error(n, e))?
                .x;
            for i in 0..nf {
                pf[i] = predictor[i] + beta * dt * dt * a_next[i];
                vf[i] += dt * ((1.0 - gamma) * af[i] + gamma * a_next[i]);
            }
            af = a_next;
        }
        p_full = dofmap.scatter(&pf, &pc);
        v_full = dofmap.scatter(&vf, &vc);

        out.times.push(t);
        out.energy.push(energy_of(&p_full, &v_full));
        for (history, &node) in out.probes.iter_mut().zip(probe_nodes) {
            history.push(p_full[node]);
        }
        if save_every > 0 && n % save_every == 0 {
            out.snapshots.push((n, ResultField::pressure(t, p_full.clone())));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::analysis::{BcSet, InitialValue, RegionValue};
    use crate::config::Expression;
    use crate::mesh::generate_interval_mesh;

    fn speeds() -> BTreeMap<String, f64> {
        BTreeMap::from([("d".to_string(), 1.0)])
    }

    #[test]
    fn zero_state_stays_zero() {
        let mesh = generate_interval_mesh(1.0, 10, "d", "L", "R").unwrap();
        let p = Problem::new(&mesh, &["d"], &speeds(), BcSet::default()).unwrap();
        let out = run_transient_newmark(
            &p,
            &TransientSpec::new(0.01, 20),
            &InitialConditions::default(),
            5,
            &[0, 10],
        )
        .unwrap();
        assert_eq!(out.snapshots.len(), 5);
        assert!(out.probes.iter().flatten().all(|v| *v == 0.0));
        assert!(out.snapshots.iter().all(|(_, f)| f.values.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn energy_is_conserved() {
        let mesh = generate_interval_mesh(1.0, 20, "d", "L", "R").unwrap();
        let p = Problem::new(&mesh, &["d"], &speeds(), BcSet::default()).unwrap();
        let ics = InitialConditions {
            p0: InitialValue::Expression(Expression::parse("cos(pi*x)").unwrap()),
            ..Default::default()
        };
        let out = run_transient_newmark(&p, &TransientSpec::new(0.05, 200), &ics, 0, &[]).unwrap();
        let e0 = out.energy[0];
        assert!(out.energy.iter().all(|e| ((e - e0) / e0).abs() <= 1e-10));
    }

    #[test]
    fn dirichlet_nodes_follow_prescribed_signal() {
        let mesh = generate_interval_mesh(1.0, 10, "d", "L", "R").unwrap();
        let bcs = BcSet {
            dirichlet: vec![RegionValue::new("L", Expression::parse("sin(2*pi*t)").unwrap())],
            ..Default::default()
        };
        let p = Problem::new(&mesh, &["d"], &speeds(), bcs).unwrap();
        let out = run_transient_newmark(
            &p,
            &TransientSpec::new(0.01, 30),
            &InitialConditions::default(),
            0,
            &[0],
        )
        .unwrap();
        for (t, v) in out.times.iter().zip(&out.probes[0]) {
            assert_eq!(*v, (2.0 * std::f64::consts::PI * t).sin());
        }
    }

    #[test]
    fn invalid_parameters() {
        let mesh = generate_interval_mesh(1.0, 2, "d", "L", "R").unwrap();
        let p = Problem::new(&mesh, &["d"], &speeds(), BcSet::default()).unwrap();
        let mut spec = TransientSpec::new(-1.0, 3);
        assert!(run_transient_newmark(&p, &spec, &InitialConditions::default(), 0, &[]).is_err());
        spec.dt = 0.1;
        spec.beta = 0.7;
        assert!(run_transient_newmark(&p, &spec, &InitialConditions::default(), 0, &[]).is_err());
    }
}
