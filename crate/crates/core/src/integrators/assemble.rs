use std::collections::BTreeMap;

use rayon::prelude::*;

use super::element::{integrate_load, mass_element_matrix, stiffness_element_matrix, ElementMatrix};
use super::AssemblyError;
use crate::config::Expression;
use crate::fe::ReferenceSet;
use crate::mesh::{Element, Mesh};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BilinearKind {
    Mass,
    Stiffness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadKind {
    /// Prescribed normal derivative `∇p·n` on a boundary region.
    Neumann,
    /// Volume source `f` on a domain region.
    Source,
}

/// A right-hand-side term bound to a region.
#[derive(Debug, Clone, PartialEq)]
pub struct Load {
    pub region: String,
    pub kind: LoadKind,
    pub value: Expression,
}

/// Row-wise node adjacency of `elements`, diagonal always included.
pub fn sparsity_pattern<'a>(n_nodes: usize, elements: impl IntoIterator<Item = &'a Element>) -> Vec<Vec<usize>> {
    let mut rows: Vec<Vec<usize>> = (0..n_nodes).map(|i| vec![i]).collect();
    for e in elements {
        for &a in &e.nodes {
            rows[a].extend_from_slice(&e.nodes);
        }
    }
    for row in &mut rows {
        row.sort_unstable();
        row.dedup();
    }
    rows
}

/// Assembles the global mass or stiffness matrix over the volume elements
/// of `pde_regions`, using `speeds` (region name → speed of sound).
///
/// Element matrices are computed in parallel on the current rayon pool and
/// summed serially in ascending element order, so the result does not depend
/// on the thread count.
pub fn assemble_bilinear<S: AsRef<str>>(
    mesh: &Mesh,
    pde_regions: &[S],
    speeds: &BTreeMap<String, f64>,
    kind: BilinearKind,
) -> Result<CsrMatrix, AssemblyError> {
    let mut region_speed: Vec<Option<f64>> = vec![None; mesh.regions.len()];
    for name in pde_regions {
        let name = name.as_ref();
        let index = mesh.region_index(name)?;
        let region = &mesh.regions[index];
        if region.dim != mesh.dim {
            return Err(AssemblyError::NotVolume {
                region: name.to_string(),
                dim: region.dim,
                expected: mesh.dim,
            });
        }
        let c = *speeds.get(name).ok_or_else(|| AssemblyError::MissingMaterial {
            region: name.to_string(),
        })?;
        region_speed[index] = Some(c);
    }

    let elements: Vec<(&Element, f64)> = mesh
        .elements
        .iter()
        .filter_map(|e| region_speed[e.region].map(|c| (e, c)))
        .collect();
    let refs = ReferenceSet::standard();
    let locals: Vec<ElementMatrix> = elements
        .par_iter()
        .map(|&(e, c)| {
            let reference = refs.get(e.shape);
            match kind {
                BilinearKind::Mass => mass_element_matrix(e, mesh, reference, c),
                BilinearKind::Stiffness => stiffness_element_matrix(e, mesh, reference),
            }
        })
        .collect::<Result<_, _>>()?;

    let pattern = sparsity_pattern(mesh.node_count(), elements.iter().map(|(e, _)| *e));
    let mut matrix = CsrMatrix::from_pattern(mesh.node_count(), &pattern);
    for ((e, _), local) in elements.iter().zip(&locals) {
        for (a, &ga) in e.nodes.iter().enumerate() {
            for (b, &gb) in e.nodes.iter().enumerate() {
                matrix.add_to(ga, gb, local.values[a][b]);
            }
        }
    }
    matrix.mark_symmetric(1e-13);
    Ok(matrix)
}

/// Checks that every load region exists and has the right dimension.
pub fn validate_loads(mesh: &Mesh, loads: &[Load]) -> Result<(), AssemblyError> {
    for load in loads {
        let region = mesh.region(&load.region)?;
        match load.kind {
            LoadKind::Neumann if region.dim + 1 != mesh.dim => {
                return Err(AssemblyError::NeumannDimension {
                    region: load.region.clone(),
                    dim: region.dim,
                    expected: mesh.dim.saturating_sub(1),
                })
            }
            LoadKind::Source if region.dim != mesh.dim => {
                return Err(AssemblyError::SourceDimension {
                    region: load.region.clone(),
                    dim: region.dim,
                })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Sums all load contributions into a full nodal vector, evaluating the
/// load expressions at time `t` and frequency `f`.
pub fn assemble_linear(mesh: &Mesh, loads: &[Load], t: f64, f: f64) -> Result<Vec<f64>, AssemblyError> {
    let mut rhs = vec![0.0; mesh.node_count()];
    let refs = ReferenceSet::standard();
    validate_loads(mesh, loads)?;
    for load in loads {
        for e in mesh.extract_region(&load.region)? {
            let local = integrate_load(e, mesh, refs.get(e.shape), |x| load.value.at(x, t, f))?;
            for (&node, v) in e.nodes.iter().zip(local) {
                rhs[node] += v;
            }
        }
    }
    Ok(rhs)
}
