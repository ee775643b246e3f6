use super::FeError;
use crate::mesh::Mesh;

/// Equation assigned to a mesh node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    Free(usize),
    Dirichlet(usize),
}

/// Equation numbering. Free equations and Dirichlet slots are each numbered
/// in ascending node order.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    equations: Vec<Equation>,
    free_nodes: Vec<usize>,
    dirichlet_nodes: Vec<usize>,
}

impl DofMap {
    /// Numbering with the given nodes constrained.
    pub fn from_constrained(n_nodes: usize, constrained: &[bool]) -> Self {
        assert_eq!(constrained.len(), n_nodes);
        let mut equations = Vec::with_capacity(n_nodes);
        let mut free_nodes = Vec::new();
        let mut dirichlet_nodes = Vec::new();
        for (node, &fixed) in constrained.iter().enumerate() {
            if fixed {
                equations.push(Equation::Dirichlet(dirichlet_nodes.len()));
                dirichlet_nodes.push(node);
            } else {
                equations.push(Equation::Free(free_nodes.len()));
                free_nodes.push(node);
            }
        }
        DofMap {
            equations,
            free_nodes,
            dirichlet_nodes,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.equations.len()
    }

    pub fn n_free(&self) -> usize {
        self.free_nodes.len()
    }

    pub fn n_dirichlet(&self) -> usize {
        self.dirichlet_nodes.len()
    }

    pub fn equation(&self, node: usize) -> Equation {
        self.equations[node]
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Node of each free equation.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free_nodes
    }

    /// Node of each Dirichlet slot.
    pub fn dirichlet_nodes(&self) -> &[usize] {
        &self.dirichlet_nodes
    }

    /// Gathers the free entries of a full nodal vector.
    pub fn restrict_free(&self, full: &[f64]) -> Vec<f64> {
        self.free_nodes.iter().map(|&n| full[n]).collect()
    }

    pub fn restrict_dirichlet(&self, full: &[f64]) -> Vec<f64> {
        self.dirichlet_nodes.iter().map(|&n| full[n]).collect()
    }

    /// Builds a full nodal vector from free and prescribed parts.
    pub fn scatter(&self, free: &[f64], prescribed: &[f64]) -> Vec<f64> {
        assert_eq!(free.len(), self.n_free());
        assert_eq!(prescribed.len(), self.n_dirichlet());
        self.equations
            .iter()
            .map(|eq| match *eq {
                Equation::Free(i) => free[i],
                Equation::Dirichlet(i) => prescribed[i],
            })
            .collect()
    }
}

/// Numbers the mesh nodes, constraining every node touched by an element of
/// the listed regions.
pub fn build_dof_map<S: AsRef<str>>(mesh: &Mesh, dirichlet_regions: &[S]) -> Result<DofMap, FeError> {
    let mut constrained = vec![false; mesh.node_count()];
    for name in dirichlet_regions {
        let name = name.as_ref();
        let region = mesh.region(name)?;
        if region.dim >= mesh.dim {
            return Err(FeError::VolumeDirichlet {
                region: name.to_string(),
                dim: region.dim,
                mesh_dim: mesh.dim,
            });
        }
        for node in mesh.region_nodes(name)? {
            constrained[node] = true;
        }
    }
    Ok(DofMap::from_constrained(mesh.node_count(), &constrained))
}
