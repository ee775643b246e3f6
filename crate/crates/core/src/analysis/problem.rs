use std::collections::BTreeMap;

use super::{AnalysisError, BcSet, InitialValue};
use crate::fe::{build_dof_map, DofMap, Equation};
use crate::integrators::{assemble_bilinear, assemble_linear, validate_loads, BilinearKind, Load, LoadKind};
use crate::mesh::Mesh;
use crate::sparse::CsrMatrix;

/// Free×free and free×constrained blocks of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub ff: CsrMatrix,
    pub fc: CsrMatrix,
}

pub fn partition(a: &CsrMatrix, dofmap: &DofMap) -> Blocks {
    let free_map: Vec<Option<usize>> = dofmap
        .equations()
        .iter()
        .map(|eq| match eq {
            Equation::Free(i) => Some(*i),
            Equation::Dirichlet(_) => None,
        })
        .collect();
    let fixed_map: Vec<Option<usize>> = dofmap
        .equations()
        .iter()
        .map(|eq| match eq {
            Equation::Dirichlet(i) => Some(*i),
            Equation::Free(_) => None,
        })
        .collect();
    let mut ff = a.select(dofmap.free_nodes(), &free_map, dofmap.n_free());
    if a.is_symmetric() {
        ff.mark_symmetric(0.0);
    }
    let fc = a.select(dofmap.free_nodes(), &fixed_map, dofmap.n_dirichlet());
    Blocks { ff, fc }
}

/// Reduced static-type system after symmetric Dirichlet elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub k_ff: CsrMatrix,
    pub m_ff: CsrMatrix,
    /// `rhs_f − K_fc p_c`
    pub rhs_f: Vec<f64>,
}

/// Keeps the free×free blocks and moves the prescribed values to the right
/// hand side.
pub fn apply_dirichlet(
    k: &CsrMatrix,
    m: &CsrMatrix,
    rhs: &[f64],
    dofmap: &DofMap,
    prescribed: &[f64],
) -> ReducedSystem {
    let kb = partition(k, dofmap);
    let mb = partition(m, dofmap);
    let mut rhs_f = dofmap.restrict_free(rhs);
    subtract_product(&mut rhs_f, &kb.fc, prescribed, 1.0);
    ReducedSystem {
        k_ff: kb.ff,
        m_ff: mb.ff,
        rhs_f,
    }
}

/// `y ← y − s·A x`
pub(crate) fn subtract_product(y: &mut [f64], a: &CsrMatrix, x: &[f64], s: f64) {
    if a.ncols() == 0 {
        return;
    }
    let mut ax = vec![0.0; a.nrows()];
    a.mul_into(x, &mut ax);
    for (yi, v) in y.iter_mut().zip(ax) {
        *yi -= s * v;
    }
}

/// Assembled acoustic system with its boundary data.
#[derive(Debug, Clone)]
pub struct Problem<'m> {
    pub mesh: &'m Mesh,
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub bcs: BcSet,
    pub dofmap: DofMap,
    pub mass_blocks: Blocks,
    pub stiffness_blocks: Blocks,
    /// For each Dirichlet slot, the index of the condition that owns it.
    owner: Vec<usize>,
    loads: Vec<Load>,
}

impl<'m> Problem<'m> {
    /// Assembles `M` and `K` over `pde_regions` and numbers the equations.
    pub fn new<S: AsRef<str>>(
        mesh: &'m Mesh,
        pde_regions: &[S],
        speeds: &BTreeMap<String, f64>,
        bcs: BcSet,
    ) -> Result<Self, AnalysisError> {
        let mut covered = vec![false; mesh.node_count()];
        for name in pde_regions {
            for e in mesh.extract_region(name.as_ref()).map_err(crate::fe::FeError::from)? {
                for &n in &e.nodes {
                    covered[n] = true;
                }
            }
        }
        let uncovered: Vec<usize> = (0..mesh.node_count()).filter(|&n| !covered[n]).collect();
        if let Some(&first) = uncovered.first() {
            return Err(AnalysisError::UncoveredNodes {
                count: uncovered.len(),
                first: mesh.nodes[first].id,
            });
        }
        let mass = assemble_bilinear(mesh, pde_regions, speeds, BilinearKind::Mass)?;
        let stiffness = assemble_bilinear(mesh, pde_regions, speeds, BilinearKind::Stiffness)?;
        Self::with_matrices(mesh, mass, stiffness, bcs)
    }

    /// Uses already assembled full-node matrices.
    pub fn with_matrices(
        mesh: &'m Mesh,
        mass: CsrMatrix,
        stiffness: CsrMatrix,
        bcs: BcSet,
    ) -> Result<Self, AnalysisError> {
        let regions: Vec<&str> = bcs.dirichlet.iter().map(|d| d.region.as_str()).collect();
        let dofmap = build_dof_map(mesh, &regions)?;
        let mut owner_of_node = vec![usize::MAX; mesh.node_count()];
        for (i, bc) in bcs.dirichlet.iter().enumerate() {
            for node in mesh.region_nodes(&bc.region).map_err(crate::fe::FeError::from)? {
                if owner_of_node[node] == usize::MAX {
                    owner_of_node[node] = i;
                }
            }
        }
        let owner = dofmap.dirichlet_nodes().iter().map(|&n| owner_of_node[n]).collect();

        let mut loads = Vec::new();
        for n in &bcs.neumann {
            loads.push(Load {
                region: n.region.clone(),
                kind: LoadKind::Neumann,
                value: n.value.clone(),
            });
        }
        for s in &bcs.sources {
            loads.push(Load {
                region: s.region.clone(),
                kind: LoadKind::Source,
                value: s.value.clone(),
            });
        }
        validate_loads(mesh, &loads)?;

        let mass_blocks = partition(&mass, &dofmap);
        let stiffness_blocks = partition(&stiffness, &dofmap);
        Ok(Problem {
            mesh,
            mass,
            stiffness,
            bcs,
            dofmap,
            mass_blocks,
            stiffness_blocks,
            owner,
            loads,
        })
    }

    pub fn n_free(&self) -> usize {
        self.dofmap.n_free()
    }

    /// Prescribed values, one per Dirichlet slot.
    pub fn prescribed(&self, t: f64, f: f64) -> Result<Vec<f64>, AnalysisError> {
        self.dofmap
            .dirichlet_nodes()
            .iter()
            .zip(&self.owner)
            .map(|(&node, &bc)| {
                let d = &self.bcs.dirichlet[bc];
                d.value
                    .at(self.mesh.nodes[node].coords, t, f)
                    .map_err(|source| AnalysisError::Evaluation {
                        region: d.region.clone(),
                        source,
                    })
            })
            .collect()
    }

    /// Full-node load vector at time `t` and frequency `f`.
    pub fn load_vector(&self, t: f64, f: f64) -> Result<Vec<f64>, AnalysisError> {
        Ok(assemble_linear(self.mesh, &self.loads, t, f)?)
    }

    /// Nodal interpolation of an initial value.
    pub fn initial_values(&self, value: &InitialValue, what: &str) -> Result<Vec<f64>, AnalysisError> {
        match value {
            InitialValue::Nodal(v) => {
                if v.len() != self.mesh.node_count() {
                    return Err(AnalysisError::InitialStateLength {
                        expected: self.mesh.node_count(),
                        found: v.len(),
                    });
                }
                Ok(v.clone())
            }
            InitialValue::Expression(e) => self
                .mesh
                .nodes
                .iter()
                .map(|n| {
                    e.at(n.coords, 0.0, 0.0).map_err(|source| AnalysisError::Evaluation {
                        region: what.to_string(),
                        source,
                    })
                })
                .collect(),
        }
    }
}
