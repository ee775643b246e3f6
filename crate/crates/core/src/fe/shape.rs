//! First-order nodal Lagrange shape functions on the reference elements.
//!
//! Reference domains: line `[-1, 1]`, triangle with vertices `(0,0)`, `(1,0)`,
//! `(0,1)`, quadrilateral `[-1, 1]²`, tetrahedron with vertices at the origin
//! and the unit axes, hexahedron `[-1, 1]³`. Vertex ordering follows Gmsh,
//! which coincides with VTK for these shapes.
//!
//! Evaluation outside the reference domain is not checked.

use crate::mesh::ElementShape;

const LINE_NODES: [[f64; 3]; 2] = [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
const TRI_NODES: [[f64; 3]; 3] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
const QUAD_NODES: [[f64; 3]; 4] = [[-1.0, -1.0, 0.0], [1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [-1.0, 1.0, 0.0]];
const TET_NODES: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
const HEX_NODES: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Reference coordinates of the element vertices.
pub fn reference_nodes(shape: ElementShape) -> &'static [[f64; 3]] {
    match shape {
        ElementShape::Point1 => &[[0.0; 3]],
        ElementShape::Line2 => &LINE_NODES,
        ElementShape::Tri3 => &TRI_NODES,
        ElementShape::Quad4 => &QUAD_NODES,
        ElementShape::Tet4 => &TET_NODES,
        ElementShape::Hex8 => &HEX_NODES,
    }
}

fn coord(xi: &[f64], k: usize) -> f64 {
    xi.get(k).copied().unwrap_or(0.0)
}

/// Shape function values `N_a(ξ)`, one per vertex.
pub fn reference_shape_values(shape: ElementShape, xi: &[f64]) -> Vec<f64> {
    let (r, s, t) = (coord(xi, 0), coord(xi, 1), coord(xi, 2));
    match shape {
        ElementShape::Point1 => vec![1.0],
        ElementShape::Line2 => vec![0.5 * (1.0 - r), 0.5 * (1.0 + r)],
        ElementShape::Tri3 => vec![1.0 - r - s, r, s],
        ElementShape::Tet4 => vec![1.0 - r - s - t, r, s, t],
        ElementShape::Quad4 => QUAD_NODES
            .iter()
            .map(|n| 0.25 * (1.0 + n[0] * r) * (1.0 + n[1] * s))
            .collect(),
        ElementShape::Hex8 => HEX_NODES
            .iter()
            .map(|n| 0.125 * (1.0 + n[0] * r) * (1.0 + n[1] * s) * (1.0 + n[2] * t))
            .collect(),
    }
}

/// Shape function gradients with respect to the reference coordinates.
///
/// Row `a` holds `∂N_a/∂ξ`; only the first `shape.dim()` components are
/// meaningful, the rest are zero.
pub fn reference_shape_gradients(shape: ElementShape, xi: &[f64]) -> Vec<[f64; 3]> {
    let (r, s, t) = (coord(xi, 0), coord(xi, 1), coord(xi, 2));
    match shape {
        ElementShape::Point1 => vec![[0.0; 3]],
        ElementShape::Line2 => vec![[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]],
        ElementShape::Tri3 => vec![[-1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        ElementShape::Tet4 => vec![[-1.0, -1.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        ElementShape::Quad4 => QUAD_NODES
            .iter()
            .map(|n| [0.25 * n[0] * (1.0 + n[1] * s), 0.25 * n[1] * (1.0 + n[0] * r), 0.0])
            .collect(),
        ElementShape::Hex8 => HEX_NODES
            .iter()
            .map(|n| {
                let (a, b, c) = (1.0 + n[0] * r, 1.0 + n[1] * s, 1.0 + n[2] * t);
                [0.125 * n[0] * b * c, 0.125 * n[1] * a * c, 0.125 * n[2] * a * b]
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn line_midpoint() {
        assert_eq!(reference_shape_values(ElementShape::Line2, &[0.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn triangle_barycenter() {
        let v = reference_shape_values(ElementShape::Tri3, &[1.0 / 3.0, 1.0 / 3.0]);
        for x in v {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quad_corner() {
        assert_eq!(
            reference_shape_values(ElementShape::Quad4, &[-1.0, -1.0]),
            vec![1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn constant_gradients() {
        assert_eq!(
            reference_shape_gradients(ElementShape::Line2, &[0.3]),
            vec![[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]]
        );
        let g = reference_shape_gradients(ElementShape::Tri3, &[0.2, 0.1]);
        assert_eq!(g, vec![[-1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let g = reference_shape_gradients(ElementShape::Quad4, &[0.0, 0.0]);
        let sum = g.iter().fold([0.0; 2], |acc, r| [acc[0] + r[0], acc[1] + r[1]]);
        assert_eq!(sum, [0.0, 0.0]);
    }

    #[test]
    fn kronecker_property() {
        for shape in ElementShape::ALL {
            let nodes = reference_nodes(shape);
            assert_eq!(nodes.len(), shape.node_count());
            for (b, xi) in nodes.iter().enumerate() {
                let v = reference_shape_values(shape, xi);
                for (a, value) in v.iter().enumerate() {
                    assert_eq!(*value, if a == b { 1.0 } else { 0.0 }, "{shape} a={a} b={b}");
                }
            }
        }
    }

    /// Maps a unit-cube sample into the reference domain of `shape`.
    fn sample(shape: ElementShape, u: [f64; 3]) -> [f64; 3] {
        match shape {
            ElementShape::Tri3 => {
                let (a, b) = if u[0] + u[1] > 1.0 {
                    (1.0 - u[0], 1.0 - u[1])
                } else {
                    (u[0], u[1])
                };
                [a, b, 0.0]
            }
            ElementShape::Tet4 => {
                let s = u[0] + u[1] + u[2];
                if s > 1.0 {
                    [u[0] / s, u[1] / s, u[2] / s].map(|x| x * 0.999)
                } else {
                    u
                }
            }
            _ => u.map(|x| 2.0 * x - 1.0),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn partition_of_unity(u in prop::array::uniform3(0.0f64..1.0)) {
            for shape in ElementShape::ALL {
                let xi = sample(shape, u);
                let sum: f64 = reference_shape_values(shape, &xi).iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-14);
                let g = reference_shape_gradients(shape, &xi);
                for k in 0..3 {
                    let s: f64 = g.iter().map(|r| r[k]).sum();
                    prop_assert!(s.abs() < 1e-14);
                }
            }
        }
    }
}
