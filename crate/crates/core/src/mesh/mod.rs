//! Unstructured meshes with named regions.
//!
//! A [`Mesh`] is a flat list of nodes and elements. Every element belongs to
//! exactly one [`Region`]; regions of the highest dimension carry the domain,
//! lower-dimensional regions carry boundary data. Node indices stored in
//! element connectivity are dense and 0-based regardless of the ids used in
//! the source file.

mod generate;
mod gmsh;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use generate::{generate_grid_mesh, generate_interval_mesh, GridSides};
pub use gmsh::{parse_mesh, read_mesh, write_msh};
pub use validate::{validate_mesh, Diagnostic, DiagnosticKind};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unsupported element type code {code}")]
    UnsupportedElement { line: usize, code: u32 },
    #[error("inconsistent mesh: {0}")]
    Consistency(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("unknown region `{name}`; available regions: {}", .available.join(", "))]
    UnknownRegion { name: String, available: Vec<String> },
    #[error("cannot read mesh file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Geometric element shapes. Only first-order shapes are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementShape {
    Point1,
    Line2,
    Tri3,
    Quad4,
    Tet4,
    Hex8,
}

impl ElementShape {
    pub const ALL: [ElementShape; 6] = [
        ElementShape::Point1,
        ElementShape::Line2,
        ElementShape::Tri3,
        ElementShape::Quad4,
        ElementShape::Tet4,
        ElementShape::Hex8,
    ];

    pub fn node_count(self) -> usize {
        match self {
            ElementShape::Point1 => 1,
            ElementShape::Line2 => 2,
            ElementShape::Tri3 => 3,
            ElementShape::Quad4 => 4,
            ElementShape::Tet4 => 4,
            ElementShape::Hex8 => 8,
        }
    }

    /// Topological dimension of the reference element.
    pub fn dim(self) -> usize {
        match self {
            ElementShape::Point1 => 0,
            ElementShape::Line2 => 1,
            ElementShape::Tri3 | ElementShape::Quad4 => 2,
            ElementShape::Tet4 | ElementShape::Hex8 => 3,
        }
    }

    pub fn gmsh_code(self) -> u32 {
        match self {
            ElementShape::Point1 => 15,
            ElementShape::Line2 => 1,
            ElementShape::Tri3 => 2,
            ElementShape::Quad4 => 3,
            ElementShape::Tet4 => 4,
            ElementShape::Hex8 => 5,
        }
    }

    pub fn from_gmsh_code(code: u32) -> Option<Self> {
        ElementShape::ALL.into_iter().find(|s| s.gmsh_code() == code)
    }

    pub fn vtk_code(self) -> u8 {
        match self {
            ElementShape::Point1 => 1,
            ElementShape::Line2 => 3,
            ElementShape::Tri3 => 5,
            ElementShape::Quad4 => 9,
            ElementShape::Tet4 => 10,
            ElementShape::Hex8 => 12,
        }
    }
}

impl fmt::Display for ElementShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ElementShape::Point1 => "point1",
            ElementShape::Line2 => "line2",
            ElementShape::Tri3 => "tri3",
            ElementShape::Quad4 => "quad4",
            ElementShape::Tet4 => "tet4",
            ElementShape::Hex8 => "hex8",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Id as found in the source file; kept for diagnostics only.
    pub id: usize,
    pub coords: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    pub shape: ElementShape,
    /// Dense 0-based node indices.
    pub nodes: Vec<usize>,
    /// Index into [`Mesh::regions`].
    pub region: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Physical tag from the source file (or assigned by a generator).
    pub id: i64,
    pub name: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub dim: usize,
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    pub regions: Vec<Region>,
}

impl Mesh {
    /// Builds a mesh; the dimension is the largest element dimension present.
    pub fn new(nodes: Vec<Node>, elements: Vec<Element>, regions: Vec<Region>) -> Self {
        let dim = elements.iter().map(|e| e.shape.dim()).max().unwrap_or(0);
        Mesh {
            dim,
            nodes,
            elements,
            regions,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn region_names(&self) -> Vec<String> {
        self.regions.iter().map(|r| r.name.clone()).collect()
    }

    pub fn region_index(&self, name: &str) -> Result<usize, MeshError> {
        self.regions
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| MeshError::UnknownRegion {
                name: name.to_string(),
                available: self.region_names(),
            })
    }

    pub fn region(&self, name: &str) -> Result<&Region, MeshError> {
        self.region_index(name).map(|i| &self.regions[i])
    }

    /// All elements of the named region, in storage order.
    pub fn extract_region(&self, name: &str) -> Result<Vec<&Element>, MeshError> {
        let index = self.region_index(name)?;
        Ok(self.elements.iter().filter(|e| e.region == index).collect())
    }

    /// Sorted set of node indices touched by the named region.
    pub fn region_nodes(&self, name: &str) -> Result<BTreeSet<usize>, MeshError> {
        Ok(self
            .extract_region(name)?
            .into_iter()
            .flat_map(|e| e.nodes.iter().copied())
            .collect())
    }

    pub fn element_coords(&self, element: &Element) -> Vec<[f64; 3]> {
        element.nodes.iter().map(|&n| self.nodes[n].coords).collect()
    }

    pub fn volume_elements(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(move |e| e.shape.dim() == self.dim)
    }
}

/// Free-function form of [`Mesh::extract_region`].
pub fn extract_region<'m>(mesh: &'m Mesh, name: &str) -> Result<Vec<&'m Element>, MeshError> {
    mesh.extract_region(name)
}
