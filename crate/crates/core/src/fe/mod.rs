//! Finite element space: reference elements, quadrature, geometry maps and
//! equation numbering.
//!
//! Only first-order nodal Lagrange bases are provided. Computational and
//! geometric elements coincide.

mod dofmap;
mod geometry;
mod quadrature;
mod shape;

use thiserror::Error;

use crate::mesh::{ElementShape, MeshError};

pub use dofmap::{build_dof_map, DofMap, Equation};
pub use geometry::{element_jacobian, jacobian_from_parts, Jacobian, Mat3};
pub use quadrature::{quadrature_rule, QuadratureRule, MAX_QUADRATURE_DEGREE};
pub use shape::{reference_nodes, reference_shape_gradients, reference_shape_values};

/// Quadrature degree used for mass, stiffness and load integrals.
pub const DEFAULT_QUADRATURE_DEGREE: usize = 2;

#[derive(Debug, Error)]
pub enum FeError {
    #[error("no quadrature rule of degree {degree} for {shape} (maximum is 5)")]
    UnsupportedQuadrature { shape: ElementShape, degree: usize },
    #[error("element {element} is degenerate (Jacobian determinant {det:e})")]
    DegenerateElement { element: usize, det: f64 },
    #[error("region `{region}` has dimension {dim} and cannot carry Dirichlet data in a {mesh_dim}D mesh")]
    VolumeDirichlet {
        region: String,
        dim: usize,
        mesh_dim: usize,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// A reference element with its quadrature rule and tabulated basis.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub shape: ElementShape,
    pub order: usize,
    pub n_basis: usize,
    pub quadrature: QuadratureRule,
    /// `values[q][a] = N_a(ξ_q)`
    pub values: Vec<Vec<f64>>,
    /// `gradients[q][a] = ∇_ξ N_a(ξ_q)`
    pub gradients: Vec<Vec<[f64; 3]>>,
}

impl ReferenceElement {
    pub fn new(shape: ElementShape, quadrature_degree: usize) -> Result<Self, FeError> {
        let quadrature = quadrature_rule(shape, quadrature_degree)?;
        let values = quadrature
            .points
            .iter()
            .map(|p| reference_shape_values(shape, p))
            .collect();
        let gradients = quadrature
            .points
            .iter()
            .map(|p| reference_shape_gradients(shape, p))
            .collect();
        Ok(ReferenceElement {
            shape,
            order: 1,
            n_basis: shape.node_count(),
            quadrature,
            values,
            gradients,
        })
    }

    /// Reference element with [`DEFAULT_QUADRATURE_DEGREE`].
    pub fn standard(shape: ElementShape) -> Self {
        Self::new(shape, DEFAULT_QUADRATURE_DEGREE).expect("default degree is supported")
    }
}

/// One [`ReferenceElement::standard`] per shape, indexed by shape.
#[derive(Debug, Clone)]
pub struct ReferenceSet {
    elements: Vec<ReferenceElement>,
}

impl ReferenceSet {
    pub fn standard() -> Self {
        ReferenceSet {
            elements: ElementShape::ALL
                .iter()
                .map(|&s| ReferenceElement::standard(s))
                .collect(),
        }
    }

    pub fn get(&self, shape: ElementShape) -> &ReferenceElement {
        let i = ElementShape::ALL
            .iter()
            .position(|&s| s == shape)
            .expect("all shapes present");
        &self.elements[i]
    }
}

impl Default for ReferenceSet {
    fn default() -> Self {
        Self::standard()
    }
}
