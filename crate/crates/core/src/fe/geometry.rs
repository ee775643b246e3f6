//! Reference-to-physical element maps.

use super::shape::reference_shape_gradients;
use super::FeError;
use crate::mesh::{Element, Mesh};

pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    /// `J[i][j] = ∂x_i/∂ξ_j`; entries outside the active block are zero.
    pub matrix: Mat3,
    /// Volume elements: `det J`. Lower-dimensional elements: the surface
    /// measure factor `sqrt(det(JᵀJ))` (1 for points).
    pub det: f64,
    /// `∂ξ/∂x` for volume elements, `None` for lower-dimensional ones.
    pub inverse: Option<Mat3>,
}

impl Jacobian {
    /// Maps reference gradients to physical gradients, `∇N = J⁻ᵀ ∇_ξ N`.
    pub fn physical_gradient(&self, reference: &[f64; 3]) -> [f64; 3] {
        let inv = self.inverse.as_ref().expect("physical gradients need a volume element");
        let mut g = [0.0; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = inv[0][i] * reference[0] + inv[1][i] * reference[1] + inv[2][i] * reference[2];
        }
        g
    }
}

/// Jacobian of `element` at reference point `xi`.
pub fn element_jacobian(element: &Element, mesh: &Mesh, xi: &[f64]) -> Result<Jacobian, FeError> {
    let coords = mesh.element_coords(element);
    let grads = reference_shape_gradients(element.shape, xi);
    jacobian_from_parts(&coords, &grads, element.shape.dim(), mesh.dim, element.id)
}

/// Jacobian from element vertex coordinates and reference gradients.
pub fn jacobian_from_parts(
    coords: &[[f64; 3]],
    grads: &[[f64; 3]],
    ref_dim: usize,
    mesh_dim: usize,
    element_id: usize,
) -> Result<Jacobian, FeError> {
    let mut matrix = [[0.0; 3]; 3];
    for (x, g) in coords.iter().zip(grads) {
        for i in 0..3 {
            for j in 0..ref_dim {
                matrix[i][j] += x[i] * g[j];
            }
        }
    }
    let degenerate = |det: f64| FeError::DegenerateElement {
        element: element_id,
        det,
    };

    if ref_dim == mesh_dim && ref_dim > 0 {
        let (det, inverse) = invert(&matrix, ref_dim);
        if !(det > 0.0) {
            return Err(degenerate(det));
        }
        return Ok(Jacobian {
            matrix,
            det,
            inverse: Some(inverse),
        });
    }

    let det = match ref_dim {
        0 => 1.0,
        1 => (matrix[0][0].powi(2) + matrix[1][0].powi(2) + matrix[2][0].powi(2)).sqrt(),
        _ => {
            // |∂x/∂ξ₁ × ∂x/∂ξ₂|
            let a = [matrix[0][0], matrix[1][0], matrix[2][0]];
            let b = [matrix[0][1], matrix[1][1], matrix[2][1]];
            let c = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
        }
    };
    if !(det > 0.0) {
        return Err(degenerate(det));
    }
    Ok(Jacobian {
        matrix,
        det,
        inverse: None,
    })
}

/// Determinant and inverse of the leading `n × n` block.
fn invert(m: &Mat3, n: usize) -> (f64, Mat3) {
    let mut inv = [[0.0; 3]; 3];
    match n {
        1 => {
            let det = m[0][0];
            inv[0][0] = 1.0 / det;
            (det, inv)
        }
        2 => {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            inv[0][0] = m[1][1] / det;
            inv[0][1] = -m[0][1] / det;
            inv[1][0] = -m[1][0] / det;
            inv[1][1] = m[0][0] / det;
            (det, inv)
        }
        _ => {
            let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
            inv[0][0] = cof(1, 2, 1, 2) / det;
            inv[0][1] = -cof(0, 2, 1, 2) / det;
            inv[0][2] = cof(0, 1, 1, 2) / det;
            inv[1][0] = -cof(1, 2, 0, 2) / det;
            inv[1][1] = cof(0, 2, 0, 2) / det;
            inv[1][2] = -cof(0, 1, 0, 2) / det;
            inv[2][0] = cof(1, 2, 0, 1) / det;
            inv[2][1] = -cof(0, 2, 0, 1) / det;
            inv[2][2] = cof(0, 1, 0, 1) / det;
            (det, inv)
        }
    }
}
