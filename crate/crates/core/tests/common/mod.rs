//! Test-side oracles shared by the integration tests. Nothing here calls
//! into the library's quadrature or shape-function code.

#![allow(dead_code)]

pub mod expr_oracle;

use acoufem::mesh::{Element, ElementShape, Mesh, Node, Region};
use nalgebra::{DMatrix, Matrix3, SymmetricEigen};

/// Gauss–Legendre rule on [-1, 1] via the Golub–Welsch eigenproblem.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// High-order rule on each reference element: tensor Gauss for lines,
/// quads and hexes; collapsed (Duffy) Gauss for simplices.
pub fn reference_rule(shape: ElementShape, n: usize) -> Vec<([f64; 3], f64)> {
    let g = gauss_legendre(n);
    // rule on [0, 1]
    let h: Vec<(f64, f64)> = g.iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let mut out = Vec::new();
    match shape {
        ElementShape::Point1 => out.push(([0.0; 3], 1.0)),
        ElementShape::Line2 => out.extend(g.iter().map(|&(x, w)| ([x, 0.0, 0.0], w))),
        ElementShape::Quad4 => {
            for &(x, wx) in &g {
                for &(y, wy) in &g {
                    out.push(([x, y, 0.0], wx * wy));
                }
            }
        }
        ElementShape::Hex8 => {
            for &(x, wx) in &g {
                for &(y, wy) in &g {
                    for &(z, wz) in &g {
                        out.push(([x, y, z], wx * wy * wz));
                    }
                }
            }
        }
        ElementShape::Tri3 => {
            for &(u, wu) in &h {
                for &(v, wv) in &h {
                    out.push(([u, v * (1.0 - u), 0.0], wu * wv * (1.0 - u)));
                }
            }
        }
        ElementShape::Tet4 => {
            for &(u, wu) in &h {
                for &(v, wv) in &h {
                    for &(w, ww) in &h {
                        let xi = [u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)];
                        out.push((xi, wu * wv * ww * (1.0 - u).powi(2) * (1.0 - v)));
                    }
                }
            }
        }
    }
    out
}

/// Basis values and reference gradients, written out independently.
pub fn basis(shape: ElementShape, p: [f64; 3]) -> (Vec<f64>, Vec<[f64; 3]>) {
    let [x, y, z] = p;
    match shape {
        ElementShape::Point1 => (vec![1.0], vec![[0.0; 3]]),
        ElementShape::Line2 => (
            vec![(1.0 - x) / 2.0, (1.0 + x) / 2.0],
            vec![[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]],
        ),
        ElementShape::Tri3 => (
            vec![1.0 - x - y, x, y],
            vec![[-1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        ),
        ElementShape::Tet4 => (
            vec![1.0 - x - y - z, x, y, z],
            vec![[-1.0, -1.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        ),
        ElementShape::Quad4 => {
            let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
            let vals = corners
                .iter()
                .map(|&(a, b)| 0.25 * (1.0 + a * x) * (1.0 + b * y))
                .collect();
            let grads = corners
                .iter()
                .map(|&(a, b)| [0.25 * a * (1.0 + b * y), 0.25 * b * (1.0 + a * x), 0.0])
                .collect();
            (vals, grads)
        }
        ElementShape::Hex8 => {
            let corners = [
                (-1.0, -1.0, -1.0),
                (1.0, -1.0, -1.0),
                (1.0, 1.0, -1.0),
                (-1.0, 1.0, -1.0),
                (-1.0, -1.0, 1.0),
                (1.0, -1.0, 1.0),
                (1.0, 1.0, 1.0),
                (-1.0, 1.0, 1.0),
            ];
            let vals = corners
                .iter()
                .map(|&(a, b, c)| 0.125 * (1.0 + a * x) * (1.0 + b * y) * (1.0 + c * z))
                .collect();
            let grads = corners
                .iter()
                .map(|&(a, b, c)| {
                    [
                        0.125 * a * (1.0 + b * y) * (1.0 + c * z),
                        0.125 * b * (1.0 + a * x) * (1.0 + c * z),
                        0.125 * c * (1.0 + a * x) * (1.0 + b * y),
                    ]
                })
                .collect();
            (vals, grads)
        }
    }
}

/// Dense `(M, K)` by brute force: for every pair of global nodes, integrate
/// the product of their basis functions (or gradients) over every volume
/// element that contains both.
pub fn dense_mass_stiffness(mesh: &Mesh, c: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = mesh.nodes.len();
    let mut m = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    for e in mesh.elements.iter().filter(|e| e.shape.dim() == mesh.dim) {
        let d = mesh.dim;
        let coords: Vec<[f64; 3]> = e.nodes.iter().map(|&i| mesh.nodes[i].coords).collect();
        for (xi, w) in reference_rule(e.shape, 8) {
            let (vals, grads) = basis(e.shape, xi);
            let mut jac = Matrix3::<f64>::identity();
            for r in 0..d {
                for s in 0..d {
                    jac[(r, s)] = coords.iter().zip(&grads).map(|(x, g)| x[r] * g[s]).sum();
                }
            }
            let det = jac.determinant();
            let inv_t = jac.try_inverse().unwrap().transpose();
            let phys: Vec<nalgebra::Vector3<f64>> = grads
                .iter()
                .map(|g| {
                    let mut v = nalgebra::Vector3::new(g[0], g[1], g[2]);
                    for i in d..3 {
                        v[i] = 0.0;
                    }
                    let mut out = inv_t * v;
                    for i in d..3 {
                        out[i] = 0.0;
                    }
                    out
                })
                .collect();
            for ga in 0..n {
                let Some(a) = e.nodes.iter().position(|&x| x == ga) else {
                    continue;
                };
                for gb in 0..n {
                    let Some(b) = e.nodes.iter().position(|&x| x == gb) else {
                        continue;
                    };
                    m[(ga, gb)] += w * det * vals[a] * vals[b] / (c * c);
                    k[(ga, gb)] += w * det * phys[a].dot(&phys[b]);
                }
            }
        }
    }
    (m, k)
}

fn node(id: usize, x: f64, y: f64, z: f64) -> Node {
    Node { id, coords: [x, y, z] }
}

fn volume(shape: ElementShape, conn: &[Vec<usize>]) -> Vec<Element> {
    conn.iter()
        .enumerate()
        .map(|(i, c)| Element {
            id: i + 1,
            shape,
            nodes: c.clone(),
            region: 0,
        })
        .collect()
}

fn region(dim: usize) -> Vec<Region> {
    vec![Region {
        id: 1,
        name: "domain".into(),
        dim,
    }]
}

/// Small affine meshes of every volume shape, each with at most 20 nodes.
pub fn small_meshes() -> Vec<(&'static str, Mesh)> {
    let mut out = Vec::new();

    let xs = [0.0, 0.13, 0.4, 0.45, 0.8, 1.1];
    let nodes = xs.iter().enumerate().map(|(i, &x)| node(i + 1, x, 0.0, 0.0)).collect();
    let conn: Vec<Vec<usize>> = (0..5).map(|i| vec![i, i + 1]).collect();
    out.push(("line2", Mesh::new(nodes, volume(ElementShape::Line2, &conn), region(1))));

    // 3×3 grid of triangles with a displaced middle node
    let mut nodes = Vec::new();
    for j in 0..3 {
        for i in 0..3 {
            let (mut x, mut y) = (0.5 * i as f64, 0.4 * j as f64);
            if i == 1 && j == 1 {
                x += 0.07;
                y -= 0.05;
            }
            nodes.push(node(nodes.len() + 1, x, y, 0.0));
        }
    }
    let mut conn = Vec::new();
    for j in 0..2 {
        for i in 0..2 {
            let a = j * 3 + i;
            conn.push(vec![a, a + 1, a + 4]);
            conn.push(vec![a, a + 4, a + 3]);
        }
    }
    out.push(("tri3", Mesh::new(nodes, volume(ElementShape::Tri3, &conn), region(2))));

    // sheared 4×3 quad grid (parallelograms)
    let mut nodes = Vec::new();
    for j in 0..4 {
        for i in 0..5 {
            let (x, y) = (0.3 * i as f64 + 0.1 * j as f64, 0.25 * j as f64);
            nodes.push(node(nodes.len() + 1, x, y, 0.0));
        }
    }
    let mut conn = Vec::new();
    for j in 0..3 {
        for i in 0..4 {
            let a = j * 5 + i;
            conn.push(vec![a, a + 1, a + 6, a + 5]);
        }
    }
    out.push(("quad4", Mesh::new(nodes, volume(ElementShape::Quad4, &conn), region(2))));

    // unit cube cut into six tetrahedra, one corner pulled out
    let mut nodes = Vec::new();
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..2 {
                let mut p = [i as f64, j as f64, k as f64];
                if (i, j, k) == (1, 1, 1) {
                    p = [1.2, 0.9, 1.1];
                }
                nodes.push(node(nodes.len() + 1, p[0], p[1], p[2]));
            }
        }
    }
    let conn = vec![
        vec![0, 1, 3, 7],
        vec![0, 1, 7, 5],
        vec![0, 5, 7, 4],
        vec![0, 3, 2, 7],
        vec![0, 2, 6, 7],
        vec![0, 6, 4, 7],
    ];
    let conn: Vec<Vec<usize>> = conn
        .into_iter()
        .map(|c| {
            let p: Vec<[f64; 3]> = c.iter().map(|&i| nodes[i].coords).collect();
            let d = |a: usize| [p[a][0] - p[0][0], p[a][1] - p[0][1], p[a][2] - p[0][2]];
            let (u, v, w) = (d(1), d(2), d(3));
            let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                + u[2] * (v[0] * w[1] - v[1] * w[0]);
            if det < 0.0 {
                vec![c[0], c[2], c[1], c[3]]
            } else {
                c
            }
        })
        .collect();
    out.push(("tet4", Mesh::new(nodes, volume(ElementShape::Tet4, &conn), region(3))));

    // two parallelepiped hexes sharing a face
    let mut nodes = Vec::new();
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..3 {
                let (x, y, z) = (
                    0.5 * i as f64 + 0.1 * k as f64,
                    0.7 * j as f64 + 0.05 * k as f64,
                    0.6 * k as f64,
                );
                nodes.push(node(nodes.len() + 1, x, y, z));
            }
        }
    }
    let idx = |i: usize, j: usize, k: usize| k * 6 + j * 3 + i;
    let conn: Vec<Vec<usize>> = (0..2)
        .map(|i| {
            vec![
                idx(i, 0, 0),
                idx(i + 1, 0, 0),
                idx(i + 1, 1, 0),
                idx(i, 1, 0),
                idx(i, 0, 1),
                idx(i + 1, 0, 1),
                idx(i + 1, 1, 1),
                idx(i, 1, 1),
            ]
        })
        .collect();
    out.push(("hex8", Mesh::new(nodes, volume(ElementShape::Hex8, &conn), region(3))));
    out
}

pub fn to_dense(a: &acoufem::sparse::CsrMatrix) -> DMatrix<f64> {
    let d = a.to_dense();
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| d[i][j])
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
