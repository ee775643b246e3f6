//! Gmsh MSH 2.2 ASCII reader and writer.
//!
//! Supported subset: `$MeshFormat` (version 2.2, ASCII, 8-byte reals),
//! `$PhysicalNames`, `$Nodes` and `$Elements`. Other sections are skipped.
//! The first tag of an element is its physical group.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{Element, ElementShape, Mesh, MeshError, Node, Region};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line with its 1-based line number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                return Some((i + 1, trimmed));
            }
        }
        None
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str), MeshError> {
        self.next_line().ok_or_else(|| MeshError::Parse {
            line: self.last + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn expect_end(&mut self, section: &str) -> Result<(), MeshError> {
        let (line, text) = self.expect_line(&format!("$End{section}"))?;
        if text != format!("$End{section}") {
            return Err(MeshError::Parse {
                line,
                message: format!("expected `$End{section}`, found `{text}`"),
            });
        }
        Ok(())
    }

    fn expect_count(&mut self, section: &str) -> Result<usize, MeshError> {
        let (line, text) = self.expect_line(&format!("{section} count"))?;
        text.parse().map_err(|_| MeshError::Parse {
            line,
            message: format!("invalid {section} count `{text}`"),
        })
    }
}

fn parse_num<T: std::str::FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T, MeshError> {
    let token = token.ok_or_else(|| MeshError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("invalid {what} `{token}`"),
    })
}

struct RawElement {
    line: usize,
    id: usize,
    shape: ElementShape,
    physical: i64,
    node_ids: Vec<usize>,
}

/// Parses the text of a Gmsh MSH 2.2 ASCII file.
pub fn parse_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines::new(text);
    let mut seen_format = false;
    let mut names: Vec<(usize, i64, String)> = Vec::new();
    let mut nodes: Option<Vec<Node>> = None;
    let mut raw_elements: Option<Vec<RawElement>> = None;

    while let Some((line, header)) = lines.next_line() {
        let Some(section) = header.strip_prefix('$') else {
            return Err(MeshError::Parse {
                line,
                message: format!("expected section header, found `{header}`"),
            });
        };
        if section.starts_with("End") || section.is_empty() || section.contains(char::is_whitespace) {
            return Err(MeshError::Parse {
                line,
                message: format!("malformed section header `{header}`"),
            });
        }
        match section {
            "MeshFormat" => {
                let (line, text) = lines.expect_line("format line")?;
                let tokens: Vec<&str> = text.split_whitespace().collect();
                if tokens.len() != 3 {
                    return Err(MeshError::Parse {
                        line,
                        message: format!("malformed format line `{text}`"),
                    });
                }
                if tokens[0] != "2.2" {
                    return Err(MeshError::Parse {
                        line,
                        message: format!("unsupported MSH version {} (only 2.2 is read)", tokens[0]),
                    });
                }
                if tokens[1] != "0" {
                    return Err(MeshError::Parse {
                        line,
                        message: "binary MSH files are not supported".into(),
                    });
                }
                if tokens[2] != "8" {
                    return Err(MeshError::Parse {
                        line,
                        message: format!("unsupported data size {}", tokens[2]),
                    });
                }
                lines.expect_end("MeshFormat")?;
                seen_format = true;
            }
            "PhysicalNames" => {
                let count = lines.expect_count("PhysicalNames")?;
                for _ in 0..count {
                    let (line, text) = lines.expect_line("physical name")?;
                    names.push(parse_physical_name(line, text)?);
                }
                lines.expect_end("PhysicalNames")?;
            }
            "Nodes" => {
                let count = lines.expect_count("Nodes")?;
                let mut list = Vec::with_capacity(count);
                for _ in 0..count {
                    let (line, text) = lines.expect_line("node")?;
                    let mut tokens = text.split_whitespace();
                    let id: usize = parse_num(tokens.next(), line, "node id")?;
                    let mut coords = [0.0; 3];
                    for (k, c) in coords.iter_mut().enumerate() {
                        *c = parse_num(tokens.next(), line, &format!("coordinate {k}"))?;
                    }
                    if tokens.next().is_some() {
                        return Err(MeshError::Parse {
                            line,
                            message: "trailing data after node coordinates".into(),
                        });
                    }
                    list.push(Node { id, coords });
                }
                lines.expect_end("Nodes")?;
                nodes = Some(list);
            }
            "Elements" => {
                let count = lines.expect_count("Elements")?;
                let mut list = Vec::with_capacity(count);
                for _ in 0..count {
                    let (line, text) = lines.expect_line("element")?;
                    list.push(parse_element(line, text)?);
                }
                lines.expect_end("Elements")?;
                raw_elements = Some(list);
            }
            other => {
                // Skip sections outside the supported subset.
                let end = format!("$End{other}");
                loop {
                    let (_, text) = lines.expect_line(&end)?;
                    if text == end {
                        break;
                    }
                }
            }
        }
    }

    if !seen_format {
        return Err(MeshError::Parse {
            line: 1,
            message: "missing $MeshFormat section".into(),
        });
    }
    let nodes = nodes.ok_or_else(|| MeshError::Parse {
        line: lines.last,
        message: "missing $Nodes section".into(),
    })?;
    let raw_elements = raw_elements.ok_or_else(|| MeshError::Parse {
        line: lines.last,
        message: "missing $Elements section".into(),
    })?;
    assemble_mesh(names, nodes, raw_elements)
}

fn parse_physical_name(line: usize, text: &str) -> Result<(usize, i64, String), MeshError> {
    let mut tokens = text.splitn(3, char::is_whitespace);
    let dim: usize = parse_num(tokens.next(), line, "physical dimension")?;
    let tag: i64 = parse_num(tokens.next(), line, "physical tag")?;
    let rest = tokens.next().unwrap_or("").trim();
    let name = rest
        .strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .ok_or_else(|| MeshError::Parse {
            line,
            message: format!("physical name must be quoted, found `{rest}`"),
        })?;
    if dim > 3 {
        return Err(MeshError::Parse {
            line,
            message: format!("invalid physical dimension {dim}"),
        });
    }
    Ok((dim, tag, name.to_string()))
}

fn parse_element(line: usize, text: &str) -> Result<RawElement, MeshError> {
    let mut tokens = text.split_whitespace();
    let id: usize = parse_num(tokens.next(), line, "element id")?;
    let code: u32 = parse_num(tokens.next(), line, "element type")?;
    let shape = ElementShape::from_gmsh_code(code).ok_or(MeshError::UnsupportedElement { line, code })?;
    let ntags: usize = parse_num(tokens.next(), line, "tag count")?;
    let mut physical = 0;
    for k in 0..ntags {
        let tag: i64 = parse_num(tokens.next(), line, "element tag")?;
        if k == 0 {
            physical = tag;
        }
    }
    let node_ids = (0..shape.node_count())
        .map(|_| parse_num(tokens.next(), line, "element node"))
        .collect::<Result<Vec<usize>, _>>()?;
    if tokens.next().is_some() {
        return Err(MeshError::Parse {
            line,
            message: format!("too many nodes for {shape} element {id}"),
        });
    }
    Ok(RawElement {
        line,
        id,
        shape,
        physical,
        node_ids,
    })
}

fn assemble_mesh(
    names: Vec<(usize, i64, String)>,
    nodes: Vec<Node>,
    mut raw: Vec<RawElement>,
) -> Result<Mesh, MeshError> {
    let mut index_of_id = HashMap::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        if index_of_id.insert(node.id, i).is_some() {
            return Err(MeshError::Consistency(format!("duplicate node id {}", node.id)));
        }
    }

    let mut regions: Vec<Region> = Vec::new();
    let mut region_of: HashMap<(usize, i64), usize> = HashMap::new();
    for (dim, tag, name) in names {
        if regions.iter().any(|r| r.name == name) {
            return Err(MeshError::Consistency(format!("duplicate physical name `{name}`")));
        }
        region_of.insert((dim, tag), regions.len());
        regions.push(Region { id: tag, name, dim });
    }

    raw.sort_by_key(|e| e.id);
    let mut elements = Vec::with_capacity(raw.len());
    for (k, e) in raw.into_iter().enumerate() {
        if k > 0 && elements.last().is_some_and(|p: &Element| p.id == e.id) {
            return Err(MeshError::Consistency(format!("duplicate element id {}", e.id)));
        }
        let dim = e.shape.dim();
        let region = *region_of.entry((dim, e.physical)).or_insert_with(|| {
            regions.push(Region {
                id: e.physical,
                name: format!("physical_{dim}_{}", e.physical),
                dim,
            });
            regions.len() - 1
        });
        let nodes = e
            .node_ids
            .iter()
            .map(|id| {
                index_of_id.get(id).copied().ok_or_else(|| {
                    MeshError::Consistency(format!(
                        "element {} (line {}) references missing node {id}",
                        e.id, e.line
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        elements.push(Element {
            id: e.id,
            shape: e.shape,
            nodes,
            region,
        });
    }

    Ok(Mesh::new(nodes, elements, regions))
}

/// Reads and parses a mesh file from disk.
pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_mesh(&text)
}

/// Serializes a mesh as MSH 2.2 ASCII. Reals use the shortest representation
/// that parses back to the same value.
pub fn write_msh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(out, "$PhysicalNames\n{}", mesh.regions.len());
    for r in &mesh.regions {
        let _ = writeln!(out, "{} {} \"{}\"", r.dim, r.id, r.name);
    }
    out.push_str("$EndPhysicalNames\n");
    let _ = writeln!(out, "$Nodes\n{}", mesh.nodes.len());
    for n in &mesh.nodes {
        let _ = writeln!(out, "{} {:?} {:?} {:?}", n.id, n.coords[0], n.coords[1], n.coords[2]);
    }
    out.push_str("$EndNodes\n");
    let _ = writeln!(out, "$Elements\n{}", mesh.elements.len());
    for e in &mesh.elements {
        let tag = mesh.regions[e.region].id;
        let _ = write!(out, "{} {} 2 {tag} {tag}", e.id, e.shape.gmsh_code());
        for &n in &e.nodes {
            let _ = write!(out, " {}", mesh.nodes[n].id);
        }
        out.push('\n');
    }
    out.push_str("$EndElements\n");
    out
}
