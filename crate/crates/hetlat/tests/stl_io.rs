mod common;

use common::{multiset, parse_ascii, parse_binary};
use hetlat::stl::{write_ascii, write_binary, StlError};
use hetlat_core::mesher::{polygonize, SampleGrid};
use hetlat_core::{ImplicitSolid, TriangleMesh, Torus, Vec3};
use proptest::prelude::*;

fn torus_mesh() -> TriangleMesh {
    let t = Torus::new(1.5, 0.4).unwrap();
    let grid = SampleGrid::covering(t.bounds().unwrap(), 0.1, 1).unwrap();
    polygonize(&t, &grid, 8).unwrap()
}

#[test]
fn ascii_and_binary_agree() {
    let mesh = torus_mesh();
    let mut bin = Vec::new();
    write_binary(&mesh, &mut bin).unwrap();
    let mut txt = Vec::new();
    write_ascii(&mesh, "torus", &mut txt).unwrap();
    let b = parse_binary(&bin).unwrap();
    let a = parse_ascii(std::str::from_utf8(&txt).unwrap()).unwrap();
    assert_eq!(b.len(), mesh.triangles.len());
    assert_eq!(bin.len(), 84 + 50 * b.len());
    assert_eq!(multiset(&a), multiset(&b));
}

#[test]
fn binary_coordinates_are_the_rounded_vertices() {
    let mesh = torus_mesh();
    let mut bin = Vec::new();
    write_binary(&mesh, &mut bin).unwrap();
    for (t, tri) in parse_binary(&bin).unwrap().iter().enumerate() {
        for (c, v) in tri.iter().zip(mesh.triangle(t)) {
            assert_eq!(*c, v.to_array().map(|x| x as f32));
        }
    }
}

#[test]
fn header_is_not_ascii_solid() {
    let mesh = TriangleMesh { vertices: vec![Vec3::ZERO, Vec3::X, Vec3::Y], triangles: vec![[0, 1, 2]] };
    let mut bin = Vec::new();
    write_binary(&mesh, &mut bin).unwrap();
    assert_eq!(bin.len(), 134);
    assert!(bin.starts_with(hetlat::stl::BINARY_TAG));
    assert!(bin[hetlat::stl::BINARY_TAG.len()..80].iter().all(|&b| b == 0));
}

#[test]
fn empty_mesh_writes_nothing() {
    let mut out = Vec::new();
    assert!(matches!(write_binary(&TriangleMesh::default(), &mut out), Err(StlError::Empty)));
    assert!(matches!(write_ascii(&TriangleMesh::default(), "x", &mut out), Err(StlError::Empty)));
    assert!(out.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.stl");
    let err = hetlat::export(&TriangleMesh::default(), Default::default(), "empty", &path).unwrap_err();
    assert_eq!(err.exit_code(), hetlat::exit::MESH);
    assert!(!path.exists());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_soups_round_trip(coords in prop::collection::vec(-1e4f64..1e4, 9..90)) {
        let n = coords.len() / 9;
        let vertices: Vec<Vec3> = coords.chunks(3).take(3 * n).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        let triangles = (0..n as u32).map(|t| [3 * t, 3 * t + 1, 3 * t + 2]).collect();
        let mesh = TriangleMesh { vertices, triangles };
        let mut bin = Vec::new();
        write_binary(&mesh, &mut bin).unwrap();
        let mut txt = Vec::new();
        write_ascii(&mesh, "soup", &mut txt).unwrap();
        let b = parse_binary(&bin).unwrap();
        prop_assert_eq!(b.len(), n);
        prop_assert_eq!(bin.len(), 84 + 50 * n);
        prop_assert_eq!(multiset(&parse_ascii(std::str::from_utf8(&txt).unwrap()).unwrap()), multiset(&b));
    }
}
