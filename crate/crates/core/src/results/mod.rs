//! Result files: legacy VTK for nodal fields, CSV for probe histories and
//! eigenfrequency tables.
//!
//! Numbers are printed as `{:.16e}` (17 significant digits), enough for every
//! `f64` to read back exactly. Output depends only on the inputs, so repeated
//! runs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::ResultField;
use crate::mesh::Mesh;

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("field `{name}` has {found} values but the mesh has {expected} nodes")]
    FieldLength {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("no probe histories to write")]
    EmptyHistories,
    #[error("probe {probe}: abscissae differ from probe 0")]
    Misaligned { probe: usize },
    #[error("probe {probe}: abscissae must increase strictly")]
    NotIncreasing { probe: usize },
    #[error("mesh has no nodes")]
    EmptyMesh,
}

fn write_file(path: &Path, text: &str) -> Result<(), ResultsError> {
    std::fs::write(path, text).map_err(|source| ResultsError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Legacy ASCII VTK 3.0 of the volume cells with the field as point data.
/// Lower-dimensional boundary elements are not written.
pub fn vtk_string(mesh: &Mesh, field: &ResultField) -> Result<String, ResultsError> {
    let n = mesh.node_count();
    if field.values.len() != n {
        return Err(ResultsError::FieldLength {
            name: field.name.clone(),
            expected: n,
            found: field.values.len(),
        });
    }
    let cells: Vec<_> = mesh.volume_elements().collect();
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{} at {:.16e}", field.name, field.time_or_freq);
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {n} double");
    for node in &mesh.nodes {
        let [x, y, z] = node.coords;
        let _ = writeln!(s, "{x:.16e} {y:.16e} {z:.16e}");
    }
    let size: usize = cells.iter().map(|e| e.nodes.len() + 1).sum();
    let _ = writeln!(s, "CELLS {} {size}", cells.len());
    for e in &cells {
        let _ = write!(s, "{}", e.nodes.len());
        for v in &e.nodes {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for e in &cells {
        let _ = writeln!(s, "{}", e.shape.vtk_code());
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    let _ = writeln!(s, "SCALARS {} double 1", field.name);
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for v in &field.values {
        let _ = writeln!(s, "{v:.16e}");
    }
    Ok(s)
}

pub fn write_vtk_unstructured(mesh: &Mesh, field: &ResultField, path: impl AsRef<Path>) -> Result<(), ResultsError> {
    write_file(path.as_ref(), &vtk_string(mesh, field)?)
}

/// Pressure history at the mesh node nearest to a requested location.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeHistory {
    pub location: [f64; 3],
    pub node: usize,
    /// `(t or f, value)` pairs.
    pub series: Vec<(f64, f64)>,
}

impl ProbeHistory {
    pub fn new(mesh: &Mesh, location: [f64; 3]) -> Result<Self, ResultsError> {
        Ok(ProbeHistory {
            location,
            node: nearest_node(mesh, location).ok_or(ResultsError::EmptyMesh)?,
            series: Vec::new(),
        })
    }
}

/// Index of the node closest to `point` in the Euclidean norm; ties go to
/// the lowest index.
pub fn nearest_node(mesh: &Mesh, point: [f64; 3]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, node) in mesh.nodes.iter().enumerate() {
        let d2: f64 = (0..3).map(|k| (node.coords[k] - point[k]).powi(2)).sum();
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, _)| i)
}

/// CSV with header `t_or_f,probe_0,probe_1,…` and one row per abscissa.
pub fn probe_csv_string(histories: &[ProbeHistory]) -> Result<String, ResultsError> {
    let first = histories.first().ok_or(ResultsError::EmptyHistories)?;
    for (i, h) in histories.iter().enumerate() {
        if h.series.len() != first.series.len() || h.series.iter().zip(&first.series).any(|(a, b)| a.0 != b.0) {
            return Err(ResultsError::Misaligned { probe: i });
        }
        if h.series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(ResultsError::NotIncreasing { probe: i });
        }
    }
    let mut s = String::from("t_or_f");
    for i in 0..histories.len() {
        let _ = write!(s, ",probe_{i}");
    }
    s.push('\n');
    for row in 0..first.series.len() {
        let _ = write!(s, "{:.16e}", first.series[row].0);
        for h in histories {
            let _ = write!(s, ",{:.16e}", h.series[row].1);
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn write_probe_csv(histories: &[ProbeHistory], path: impl AsRef<Path>) -> Result<(), ResultsError> {
    write_file(path.as_ref(), &probe_csv_string(histories)?)
}

/// CSV with header `mode,lambda,frequency`; modes are numbered from 1.
pub fn eigenfrequency_csv_string(pairs: &[(f64, f64)]) -> String {
    let mut s = String::from("mode,lambda,frequency\n");
    for (i, (lambda, f)) in pairs.iter().enumerate() {
        let _ = writeln!(s, "{},{lambda:.16e},{f:.16e}", i + 1);
    }
    s
}

pub fn write_eigenfrequency_csv(pairs: &[(f64, f64)], path: impl AsRef<Path>) -> Result<(), ResultsError> {
    write_file(path.as_ref(), &eigenfrequency_csv_string(pairs))
}
