//! Structured test-case meshes.

use super::{Element, ElementShape, Mesh, MeshError, Node, Region};

/// Region names for the four sides of a rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSides {
    pub left: String,
    pub right: String,
    pub bottom: String,
    pub top: String,
}

impl GridSides {
    pub fn new(left: &str, right: &str, bottom: &str, top: &str) -> Self {
        GridSides {
            left: left.into(),
            right: right.into(),
            bottom: bottom.into(),
            top: top.into(),
        }
    }
}

/// Appends a region, or reuses one of the same name and dimension.
fn region_for(regions: &mut Vec<Region>, name: &str, dim: usize) -> Result<usize, MeshError> {
    if let Some(i) = regions.iter().position(|r| r.name == name) {
        if regions[i].dim != dim {
            return Err(MeshError::Argument(format!(
                "region name `{name}` used for both {}D and {dim}D entities",
                regions[i].dim
            )));
        }
        return Ok(i);
    }
    regions.push(Region {
        id: regions.len() as i64 + 1,
        name: name.to_string(),
        dim,
    });
    Ok(regions.len() - 1)
}

/// Uniform 1D mesh of `n` line2 elements on `[0, length]` with point1
/// boundary elements at both ends.
pub fn generate_interval_mesh(length: f64, n: usize, region: &str, left: &str, right: &str) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::Argument("interval mesh needs at least one element".into()));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(MeshError::Argument(format!(
            "interval length must be positive, got {length}"
        )));
    }
    let mut regions = Vec::new();
    let volume = region_for(&mut regions, region, 1)?;
    let left_region = region_for(&mut regions, left, 0)?;
    let right_region = region_for(&mut regions, right, 0)?;

    let nodes = (0..=n)
        .map(|i| Node {
            id: i + 1,
            coords: [length * i as f64 / n as f64, 0.0, 0.0],
        })
        .collect();
    let mut elements: Vec<Element> = (0..n)
        .map(|i| Element {
            id: i + 1,
            shape: ElementShape::Line2,
            nodes: vec![i, i + 1],
            region: volume,
        })
        .collect();
    for (node, region) in [(0, left_region), (n, right_region)] {
        elements.push(Element {
            id: elements.len() + 1,
            shape: ElementShape::Point1,
            nodes: vec![node],
            region,
        });
    }
    Ok(Mesh::new(nodes, elements, regions))
}

/// Uniform `nx` × `ny` quad4 mesh of `[0, lx] × [0, ly]` with line2 boundary
/// elements in four side regions. Sides sharing a name share a region.
pub fn generate_grid_mesh(
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    region: &str,
    sides: &GridSides,
) -> Result<Mesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::Argument(format!("grid needs nx, ny >= 1, got {nx} x {ny}")));
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(MeshError::Argument(format!(
            "grid extents must be positive, got {lx} x {ly}"
        )));
    }
    let mut regions = Vec::new();
    let volume = region_for(&mut regions, region, 2)?;
    let left = region_for(&mut regions, &sides.left, 1)?;
    let right = region_for(&mut regions, &sides.right, 1)?;
    let bottom = region_for(&mut regions, &sides.bottom, 1)?;
    let top = region_for(&mut regions, &sides.top, 1)?;

    let stride = nx + 1;
    let at = |i: usize, j: usize| j * stride + i;
    let mut nodes = Vec::with_capacity(stride * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push(Node {
                id: nodes.len() + 1,
                coords: [lx * i as f64 / nx as f64, ly * j as f64 / ny as f64, 0.0],
            });
        }
    }

    let mut elements = Vec::with_capacity(nx * ny + 2 * (nx + ny));
    let mut push = |shape, nodes: Vec<usize>, region| {
        let id = elements.len() + 1;
        elements.push(Element {
            id,
            shape,
            nodes,
            region,
        });
    };
    for j in 0..ny {
        for i in 0..nx {
            push(
                ElementShape::Quad4,
                vec![at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)],
                volume,
            );
        }
    }
    // Boundary segments run counter-clockwise around the rectangle.
    for j in (0..ny).rev() {
        push(ElementShape::Line2, vec![at(0, j + 1), at(0, j)], left);
    }
    for j in 0..ny {
        push(ElementShape::Line2, vec![at(nx, j), at(nx, j + 1)], right);
    }
    for i in 0..nx {
        push(ElementShape::Line2, vec![at(i, 0), at(i + 1, 0)], bottom);
    }
    for i in (0..nx).rev() {
        push(ElementShape::Line2, vec![at(i + 1, ny), at(i, ny)], top);
    }
    Ok(Mesh::new(nodes, elements, regions))
}
