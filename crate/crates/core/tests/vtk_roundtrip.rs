use acoufem::analysis::ResultField;
use acoufem::mesh::{generate_grid_mesh, generate_interval_mesh, parse_mesh, GridSides, Mesh};
use acoufem::results::{vtk_string, write_vtk_unstructured};
use proptest::prelude::*;
use sha2::{Digest, Sha256};

struct VtkFile {
    points: Vec<[f64; 3]>,
    cells: Vec<Vec<usize>>,
    types: Vec<u8>,
    scalars: Vec<f64>,
}

struct Tokens<'a>(std::vec::IntoIter<&'a str>);

impl<'a> Tokens<'a> {
    fn word(&mut self, want: &str) {
        assert_eq!(self.0.next(), Some(want));
    }

    fn num<T: std::str::FromStr>(&mut self) -> T
    where
        T::Err: std::fmt::Debug,
    {
        self.0.next().expect("token").parse().unwrap()
    }
}

/// Minimal legacy-VTK reader, written against the file format only.
fn read_vtk(text: &str) -> VtkFile {
    let mut lines = text.split('\n');
    assert_eq!(lines.next(), Some("# vtk DataFile Version 3.0"));
    lines.next();
    assert_eq!(lines.next(), Some("ASCII"));
    assert_eq!(lines.next(), Some("DATASET UNSTRUCTURED_GRID"));
    let mut t = Tokens(lines.flat_map(str::split_whitespace).collect::<Vec<_>>().into_iter());
    t.word("POINTS");
    let n: usize = t.num();
    t.word("double");
    let points = (0..n).map(|_| [t.num(), t.num(), t.num()]).collect();
    t.word("CELLS");
    let nc: usize = t.num();
    let size: usize = t.num();
    let mut cells = Vec::new();
    let mut used = 0;
    for _ in 0..nc {
        let k: usize = t.num();
        cells.push((0..k).map(|_| t.num()).collect());
        used += k + 1;
    }
    assert_eq!(used, size);
    t.word("CELL_TYPES");
    assert_eq!(t.num::<usize>(), nc);
    let types = (0..nc).map(|_| t.num()).collect();
    t.word("POINT_DATA");
    assert_eq!(t.num::<usize>(), n);
    for w in ["SCALARS", "acouPressure", "double", "1", "LOOKUP_TABLE", "default"] {
        t.word(w);
    }
    let scalars = (0..n).map(|_| t.num()).collect();
    assert_eq!(t.0.next(), None);
    VtkFile {
        points,
        cells,
        types,
        scalars,
    }
}

fn check_round_trip(mesh: &Mesh, values: Vec<f64>) {
    let field = ResultField::pressure(0.125, values);
    let text = vtk_string(mesh, &field).unwrap();
    let vtk = read_vtk(&text);
    let coords: Vec<[f64; 3]> = mesh.nodes.iter().map(|n| n.coords).collect();
    assert_eq!(vtk.points, coords);
    let volume: Vec<_> = mesh.elements.iter().filter(|e| e.shape.dim() == mesh.dim).collect();
    assert_eq!(vtk.cells, volume.iter().map(|e| e.nodes.clone()).collect::<Vec<_>>());
    assert_eq!(vtk.types, volume.iter().map(|e| e.shape.vtk_code()).collect::<Vec<_>>());
    assert_eq!(
        vtk.scalars.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        field.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1.0..1.0f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_round_trip(nx in 1..6usize, ny in 1..6usize, lx in 1e-3..1e3f64, seed in prop::collection::vec(value(), 49)) {
        let mesh = generate_grid_mesh(lx, lx * 0.7, nx, ny, "a", &GridSides::new("l", "r", "b", "t")).unwrap();
        let values = seed.into_iter().cycle().take(mesh.node_count()).collect();
        check_round_trip(&mesh, values);
    }

    #[test]
    fn interval_round_trip(n in 1..40usize, values in prop::collection::vec(value(), 41)) {
        let mesh = generate_interval_mesh(1.0 / 3.0, n, "d", "L", "R").unwrap();
        check_round_trip(&mesh, values[..=n].to_vec());
    }
}

#[test]
fn mixed_three_dimensional_mesh() {
    // one tet and one hex sharing no nodes, plus a boundary triangle
    let text = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$PhysicalNames\n2\n2 1 \"skin\"\n3 2 \"body\"\n$EndPhysicalNames\n\
$Nodes\n12\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 2 0 0\n6 3 0 0\n7 3 1 0\n8 2 1 0\n9 2 0 1\n10 3 0 1\n11 3 1 1\n12 2 1 1\n$EndNodes\n\
$Elements\n3\n1 2 2 1 1 1 2 3\n2 4 2 2 2 1 2 3 4\n3 5 2 2 2 5 6 7 8 9 10 11 12\n$EndElements\n";
    let mesh = parse_mesh(text).unwrap();
    let values = (0..12).map(|i| (i as f64).sqrt() / 7.0).collect();
    check_round_trip(&mesh, values);
    let vtk = read_vtk(&vtk_string(&mesh, &ResultField::pressure(0.0, vec![0.0; 12])).unwrap());
    assert_eq!(vtk.types, vec![10, 12]);
}

#[test]
fn rewrite_is_byte_identical() {
    let mesh = generate_grid_mesh(1.0, 1.0, 7, 5, "a", &GridSides::new("l", "r", "b", "t")).unwrap();
    let field = ResultField::pressure(1.0, (0..mesh.node_count()).map(|i| (i as f64 * 0.37).sin()).collect());
    let dir = tempfile::tempdir().unwrap();
    let digest = |name: &str| {
        let path = dir.path().join(name);
        write_vtk_unstructured(&mesh, &field, &path).unwrap();
        Sha256::digest(std::fs::read(&path).unwrap())
    };
    assert_eq!(digest("a.vtk"), digest("b.vtk"));
}

#[test]
fn unwritable_path_is_an_error() {
    let mesh = generate_interval_mesh(1.0, 1, "d", "L", "R").unwrap();
    let field = ResultField::pressure(0.0, vec![0.0, 1.0]);
    let err = write_vtk_unstructured(&mesh, &field, "/nonexistent-dir/x/out.vtk").unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/x/out.vtk"));
}
