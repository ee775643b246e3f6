use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::Mesh;
use crate::fe::{element_jacobian, quadrature_rule, FeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    NoVolumeRegion,
    DuplicateRegionName,
    UnresolvedRegion,
    RegionDimensionMismatch,
    ConnectivityLength,
    DanglingNode,
    NonPositiveJacobian,
    NonConformingBoundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    /// Element id the diagnostic refers to, if any.
    pub element: Option<usize>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.element {
            Some(id) => write!(f, "element {id}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks the structural invariants of a mesh. Returns one diagnostic per
/// violation; an empty list means the mesh is usable for assembly.
pub fn validate_mesh(mesh: &Mesh) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |element, kind, message: String| out.push(Diagnostic { element, kind, message });

    let mut names = HashSet::new();
    for r in &mesh.regions {
        if !names.insert(r.name.as_str()) {
            push(
                None,
                DiagnosticKind::DuplicateRegionName,
                format!("region name `{}` is not unique", r.name),
            );
        }
    }

    let has_volume = mesh.dim >= 1
        && mesh.elements.iter().any(|e| {
            e.shape.dim() == mesh.dim && e.region < mesh.regions.len() && mesh.regions[e.region].dim == mesh.dim
        });
    if !has_volume {
        push(None, DiagnosticKind::NoVolumeRegion, "mesh has no volume region".into());
    }

    let n_nodes = mesh.nodes.len();
    let mut well_formed = vec![false; mesh.elements.len()];
    for (k, e) in mesh.elements.iter().enumerate() {
        let id = Some(e.id);
        if e.region >= mesh.regions.len() {
            push(
                id,
                DiagnosticKind::UnresolvedRegion,
                format!("region index {} does not resolve", e.region),
            );
        } else if mesh.regions[e.region].dim != e.shape.dim() {
            push(
                id,
                DiagnosticKind::RegionDimensionMismatch,
                format!(
                    "{} element in {}D region `{}`",
                    e.shape, mesh.regions[e.region].dim, mesh.regions[e.region].name
                ),
            );
        }
        if e.nodes.len() != e.shape.node_count() {
            push(
                id,
                DiagnosticKind::ConnectivityLength,
                format!(
                    "{} element has {} nodes, expected {}",
                    e.shape,
                    e.nodes.len(),
                    e.shape.node_count()
                ),
            );
            continue;
        }
        if let Some(&bad) = e.nodes.iter().find(|&&n| n >= n_nodes) {
            push(
                id,
                DiagnosticKind::DanglingNode,
                format!("node index {bad} out of range (mesh has {n_nodes} nodes)"),
            );
            continue;
        }
        well_formed[k] = true;
        if e.shape.dim() == mesh.dim && mesh.dim > 0 {
            let rule = quadrature_rule(e.shape, 2).expect("degree 2 is supported");
            let worst = rule
                .points
                .iter()
                .map(|xi| match element_jacobian(e, mesh, xi) {
                    Ok(j) => j.det,
                    Err(FeError::DegenerateElement { det, .. }) => det,
                    Err(_) => f64::NAN,
                })
                .fold(f64::INFINITY, f64::min);
            if !(worst > 0.0) {
                push(
                    id,
                    DiagnosticKind::NonPositiveJacobian,
                    format!("Jacobian determinant {worst:e} is not positive"),
                );
            }
        }
    }

    // Conformity is only checked against intact volume connectivity.
    let volumes_intact = mesh
        .elements
        .iter()
        .zip(&well_formed)
        .all(|(e, ok)| *ok || e.shape.dim() != mesh.dim);
    if !volumes_intact {
        return out;
    }
    // node -> volume elements touching it
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (k, e) in mesh.elements.iter().enumerate() {
        if well_formed[k] && e.shape.dim() == mesh.dim {
            for &n in &e.nodes {
                touching[n].push(k);
            }
        }
    }
    for (k, e) in mesh.elements.iter().enumerate() {
        if !well_formed[k] || e.shape.dim() == mesh.dim {
            continue;
        }
        let own: BTreeSet<usize> = e.nodes.iter().copied().collect();
        let conforming = touching[e.nodes[0]]
            .iter()
            .any(|&v| own.iter().all(|n| mesh.elements[v].nodes.contains(n)));
        if !conforming {
            push(
                Some(e.id),
                DiagnosticKind::NonConformingBoundary,
                "boundary element nodes are not contained in any volume element".into(),
            );
        }
    }
    out
}
