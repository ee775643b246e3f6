//! Element integrators and global assembly.
//!
//! Bilinear forms produce the mass matrix `∫ N_a N_b / c² dΩ` and the
//! stiffness matrix `∫ ∇N_a·∇N_b dΩ`. Linear forms produce the volume source
//! and Neumann surface loads. Assembly works on the full node numbering;
//! Dirichlet elimination happens later.

mod assemble;
mod element;

use thiserror::Error;

use crate::config::EvalError;
use crate::fe::FeError;
use crate::mesh::MeshError;

pub use assemble::{
    assemble_bilinear, assemble_linear, sparsity_pattern, validate_loads, BilinearKind, Load, LoadKind,
};
pub use element::{
    mass_element_matrix, neumann_surface_vector_element, stiffness_element_matrix, volume_source_vector_element,
    ElementMatrix,
};

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("region `{region}` has no material")]
    MissingMaterial { region: String },
    #[error("PDE region `{region}` has dimension {dim}; expected a volume region of dimension {expected}")]
    NotVolume {
        region: String,
        dim: usize,
        expected: usize,
    },
    #[error("speed of sound must be positive, got {c} for region `{region}`")]
    InvalidSpeed { region: String, c: f64 },
    #[error("Neumann load on region `{region}` of dimension {dim}; expected dimension {expected}")]
    NeumannDimension {
        region: String,
        dim: usize,
        expected: usize,
    },
    #[error("source load on region `{region}` of dimension {dim}; sources need a volume region")]
    SourceDimension { region: String, dim: usize },
    #[error("region `{region}`: {source}")]
    Evaluation {
        region: String,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Fe(#[from] FeError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
