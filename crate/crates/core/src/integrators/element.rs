use super::AssemblyError;
use crate::config::EvalError;
use crate::fe::{jacobian_from_parts, ReferenceElement};
use crate::mesh::{Element, Mesh};

/// Dense element matrix, `values[a][b]` for local nodes `a`, `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix {
    pub element_id: usize,
    pub values: Vec<Vec<f64>>,
}

impl ElementMatrix {
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().flatten().sum()
    }
}

/// `m_ab = ∫_e N_a N_b / c² dΩ`
pub fn mass_element_matrix(
    element: &Element,
    mesh: &Mesh,
    reference: &ReferenceElement,
    c: f64,
) -> Result<ElementMatrix, AssemblyError> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(AssemblyError::InvalidSpeed {
            region: mesh.regions[element.region].name.clone(),
            c,
        });
    }
    let coords = mesh.element_coords(element);
    let n = reference.n_basis;
    let inv_c2 = 1.0 / (c * c);
    let mut values = vec![vec![0.0; n]; n];
    for (q, w) in reference.quadrature.weights.iter().enumerate() {
        let jac = jacobian_from_parts(
            &coords,
            &reference.gradients[q],
            element.shape.dim(),
            mesh.dim,
            element.id,
        )?;
        let scale = w * jac.det * inv_c2;
        let phi = &reference.values[q];
        for a in 0..n {
            for b in 0..n {
                values[a][b] += scale * (phi[a] * phi[b]);
            }
        }
    }
    Ok(ElementMatrix {
        element_id: element.id,
        values,
    })
}

/// `k_ab = ∫_e ∇N_a·∇N_b dΩ` for a volume element.
pub fn stiffness_element_matrix(
    element: &Element,
    mesh: &Mesh,
    reference: &ReferenceElement,
) -> Result<ElementMatrix, AssemblyError> {
    let coords = mesh.element_coords(element);
    let n = reference.n_basis;
    let mut values = vec![vec![0.0; n]; n];
    for (q, w) in reference.quadrature.weights.iter().enumerate() {
        let jac = jacobian_from_parts(
            &coords,
            &reference.gradients[q],
            element.shape.dim(),
            mesh.dim,
            element.id,
        )?;
        let grads: Vec<[f64; 3]> = reference.gradients[q]
            .iter()
            .map(|g| jac.physical_gradient(g))
            .collect();
        let scale = w * jac.det;
        for a in 0..n {
            for b in 0..n {
                let d = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1] + grads[a][2] * grads[b][2];
                values[a][b] += scale * d;
            }
        }
    }
    Ok(ElementMatrix {
        element_id: element.id,
        values,
    })
}

/// `r_a = ∫_s N_a g ds` over a boundary element. A point element reduces to
/// the value of `g` at the point.
pub fn neumann_surface_vector_element<G>(
    element: &Element,
    mesh: &Mesh,
    reference: &ReferenceElement,
    g: G,
) -> Result<Vec<f64>, AssemblyError>
where
    G: Fn([f64; 3]) -> Result<f64, EvalError>,
{
    integrate_load(element, mesh, reference, g)
}

/// `r_a = ∫_e N_a f dΩ` over a volume element.
pub fn volume_source_vector_element<F>(
    element: &Element,
    mesh: &Mesh,
    reference: &ReferenceElement,
    f: F,
) -> Result<Vec<f64>, AssemblyError>
where
    F: Fn([f64; 3]) -> Result<f64, EvalError>,
{
    integrate_load(element, mesh, reference, f)
}

pub(super) fn integrate_load<G>(
    element: &Element,
    mesh: &Mesh,
    reference: &ReferenceElement,
    g: G,
) -> Result<Vec<f64>, AssemblyError>
where
    G: Fn([f64; 3]) -> Result<f64, EvalError>,
{
    let coords = mesh.element_coords(element);
    let mut r = vec![0.0; reference.n_basis];
    for (q, w) in reference.quadrature.weights.iter().enumerate() {
        let jac = jacobian_from_parts(
            &coords,
            &reference.gradients[q],
            element.shape.dim(),
            mesh.dim,
            element.id,
        )?;
        let phi = &reference.values[q];
        let mut x = [0.0; 3];
        for (p, node) in phi.iter().zip(&coords) {
            for i in 0..3 {
                x[i] += p * node[i];
            }
        }
        let value = g(x).map_err(|source| AssemblyError::Evaluation {
            region: mesh.regions[element.region].name.clone(),
            source,
        })?;
        let scale = w * jac.det * value;
        for (ra, pa) in r.iter_mut().zip(phi) {
            *ra += scale * pa;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe::ReferenceSet;
    use crate::mesh::{generate_grid_mesh, generate_interval_mesh, ElementShape, GridSides, Node, Region};

    fn unit_triangle() -> Mesh {
        Mesh::new(
            vec![
                Node {
                    id: 1,
                    coords: [0.0, 0.0, 0.0],
                },
                Node {
                    id: 2,
                    coords: [1.0, 0.0, 0.0],
                },
                Node {
                    id: 3,
                    coords: [0.0, 1.0, 0.0],
                },
            ],
            vec![Element {
                id: 1,
                shape: ElementShape::Tri3,
                nodes: vec![0, 1, 2],
                region: 0,
            }],
            vec![Region {
                id: 1,
                name: "t".into(),
                dim: 2,
            }],
        )
    }

    fn close(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn line_matrices() {
        let refs = ReferenceSet::standard();
        let r = refs.get(ElementShape::Line2);
        for h in [0.1, 1.0, 2.5] {
            let mesh = generate_interval_mesh(h, 1, "d", "L", "R").unwrap();
            let e = &mesh.elements[0];
            let m = mass_element_matrix(e, &mesh, r, 2.0).unwrap();
            let s = h / 24.0;
            assert!(close(&m.values, &[vec![2.0 * s, s], vec![s, 2.0 * s]], 1e-15));
            let k = stiffness_element_matrix(e, &mesh, r).unwrap();
            assert!(close(
                &k.values,
                &[vec![1.0 / h, -1.0 / h], vec![-1.0 / h, 1.0 / h]],
                1e-13
            ));
            let f = volume_source_vector_element(e, &mesh, r, |_| Ok(1.0)).unwrap();
            assert!((f[0] - h / 2.0).abs() < 1e-15 && (f[1] - h / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_matrices() {
        let mesh = unit_triangle();
        let refs = ReferenceSet::standard();
        let r = refs.get(ElementShape::Tri3);
        let e = &mesh.elements[0];
        let m = mass_element_matrix(e, &mesh, r, 1.0).unwrap();
        let want = [vec![2.0, 1.0, 1.0], vec![1.0, 2.0, 1.0], vec![1.0, 1.0, 2.0]]
            .map(|row| row.iter().map(|v| v / 24.0).collect::<Vec<_>>());
        assert!(close(&m.values, &want, 1e-15));
        let k = stiffness_element_matrix(e, &mesh, r).unwrap();
        let want = [vec![1.0, -0.5, -0.5], vec![-0.5, 0.5, 0.0], vec![-0.5, 0.0, 0.5]];
        assert!(close(&k.values, &want, 1e-15));
        let f = volume_source_vector_element(e, &mesh, r, |_| Ok(1.0)).unwrap();
        assert!(f.iter().all(|v| (v - 1.0 / 6.0).abs() < 1e-15));
        let zero = volume_source_vector_element(e, &mesh, r, |_| Ok(0.0)).unwrap();
        assert_eq!(zero, vec![0.0; 3]);
    }

    #[test]
    fn mass_sums_to_measure_and_stiffness_kills_constants() {
        let sides = GridSides::new("l", "r", "b", "t");
        let mesh = generate_grid_mesh(2.0, 0.5, 1, 1, "a", &sides).unwrap();
        let refs = ReferenceSet::standard();
        let e = &mesh.elements[0];
        let r = refs.get(e.shape);
        let m = mass_element_matrix(e, &mesh, r, 3.0).unwrap();
        assert!((m.sum() - 1.0 / 9.0).abs() < 1e-14);
        let rows: Vec<f64> = m.values.iter().map(|row| row.iter().sum()).collect();
        assert!(rows.iter().all(|s| (s - rows[0]).abs() < 1e-15));
        let k = stiffness_element_matrix(e, &mesh, r).unwrap();
        for row in &k.values {
            assert!(row.iter().sum::<f64>().abs() < 1e-13);
        }
    }

    #[test]
    fn neumann_vectors() {
        let refs = ReferenceSet::standard();
        let mesh = generate_interval_mesh(1.0, 2, "d", "L", "R").unwrap();
        let point = &mesh.elements[2];
        let r = neumann_surface_vector_element(point, &mesh, refs.get(point.shape), |_| Ok(1.0)).unwrap();
        assert_eq!(r, vec![1.0]);

        let sides = GridSides::new("l", "r", "b", "t");
        let mesh = generate_grid_mesh(0.7, 1.0, 1, 1, "a", &sides).unwrap();
        let edge = mesh
            .elements
            .iter()
            .find(|e| mesh.regions[e.region].name == "b")
            .unwrap();
        let refe = refs.get(edge.shape);
        let h = 0.7;
        let r = neumann_surface_vector_element(edge, &mesh, refe, |_| Ok(1.0)).unwrap();
        assert!((r[0] - h / 2.0).abs() < 1e-15 && (r[1] - h / 2.0).abs() < 1e-15);
        let r = neumann_surface_vector_element(edge, &mesh, refe, |x| Ok(x[0] / h)).unwrap();
        let start = mesh.nodes[edge.nodes[0]].coords[0];
        let (near, far) = if start == 0.0 { (r[0], r[1]) } else { (r[1], r[0]) };
        assert!((near - h / 6.0).abs() < 1e-15 && (far - h / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bad_speed_is_rejected() {
        let mesh = generate_interval_mesh(1.0, 1, "d", "L", "R").unwrap();
        let refs = ReferenceSet::standard();
        let e = &mesh.elements[0];
        for c in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                mass_element_matrix(e, &mesh, refs.get(e.shape), c),
                Err(AssemblyError::InvalidSpeed { .. })
            ));
        }
    }
}
