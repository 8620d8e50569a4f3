//! STL writers. Facet normals are recomputed from the winding.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use hetlat_core::{TriangleMesh, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StlFormat {
    Ascii,
    #[default]
    Binary,
}

impl StlFormat {
    pub fn id(self) -> &'static str {
        match self {
            StlFormat::Ascii => "ascii",
            StlFormat::Binary => "binary",
        }
    }
}

impl FromStr for StlFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ascii" => Ok(StlFormat::Ascii),
            "binary" => Ok(StlFormat::Binary),
            _ => Err(format!("unknown format `{s}`, expected ascii or binary")),
        }
    }
}

impl fmt::Display for StlFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StlError {
    #[error("refusing to write an empty mesh")]
    Empty,
    #[error("{0} triangles do not fit a binary STL count")]
    TooLarge(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Header tag; never starts with `solid`.
pub const BINARY_TAG: &[u8] = b"hetlat binary STL";

fn normal(t: [Vec3; 3]) -> Vec3 {
    (t[1] - t[0]).cross(t[2] - t[0]).normalized().unwrap_or(Vec3::ZERO)
}

pub fn write_binary<W: Write>(mesh: &TriangleMesh, mut sink: W) -> Result<(), StlError> {
    if mesh.is_empty() {
        return Err(StlError::Empty);
    }
    let count = u32::try_from(mesh.triangles.len()).map_err(|_| StlError::TooLarge(mesh.triangles.len()))?;
    let mut header = [0u8; 80];
    header[..BINARY_TAG.len()].copy_from_slice(BINARY_TAG);
    let mut buf = Vec::with_capacity(84 + 50 * mesh.triangles.len());
    buf.extend_from_slice(&header);
    buf.extend_from_slice(&count.to_le_bytes());
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangle(t);
        for v in std::iter::once(normal(tri)).chain(tri) {
            for c in v.to_array() {
                buf.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        buf.extend_from_slice(&[0, 0]);
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

pub fn write_ascii<W: Write>(mesh: &TriangleMesh, name: &str, sink: W) -> Result<(), StlError> {
    if mesh.is_empty() {
        return Err(StlError::Empty);
    }
    let name: String = name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    let mut w = io::BufWriter::new(sink);
    writeln!(w, "solid {name}")?;
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangle(t);
        let n = normal(tri);
        writeln!(w, "  facet normal {:.8e} {:.8e} {:.8e}", n.x as f32, n.y as f32, n.z as f32)?;
        writeln!(w, "    outer loop")?;
        for v in tri {
            writeln!(w, "      vertex {:.8e} {:.8e} {:.8e}", v.x as f32, v.y as f32, v.z as f32)?;
        }
        writeln!(w, "    endloop")?;
        writeln!(w, "  endfacet")?;
    }
    writeln!(w, "endsolid {name}")?;
    w.flush()?;
    Ok(())
}

pub fn write<W: Write>(mesh: &TriangleMesh, format: StlFormat, name: &str, sink: W) -> Result<(), StlError> {
    match format {
        StlFormat::Ascii => write_ascii(mesh, name, sink),
        StlFormat::Binary => write_binary(mesh, sink),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> TriangleMesh {
        TriangleMesh {
            vertices: vec![Vec3::ZERO, Vec3::X, Vec3::Y],
            triangles: vec![[0, 1, 2]],
        }
    }

    #[test]
    fn binary_layout() {
        let mut out = Vec::new();
        write_binary(&one(), &mut out).unwrap();
        assert_eq!(out.len(), 134);
        assert!(!out.starts_with(b"solid"));
        assert_eq!(&out[80..84], &1u32.to_le_bytes());
        // normal +z
        assert_eq!(f32::from_le_bytes(out[92..96].try_into().unwrap()), 1.0);
        assert_eq!(&out[132..134], &[0, 0]);
    }

    #[test]
    fn ascii_layout() {
        let mut out = Vec::new();
        write_ascii(&one(), "unit part", &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("solid unit_part\n"));
        assert!(text.trim_end().ends_with("endsolid unit_part"));
        assert!(text.contains("vertex 1.00000000e0 0.00000000e0 0.00000000e0"));
    }

    #[test]
    fn empty_mesh_is_refused() {
        let mut out = Vec::new();
        assert!(matches!(write_binary(&TriangleMesh::default(), &mut out), Err(StlError::Empty)));
        assert!(matches!(write_ascii(&TriangleMesh::default(), "x", &mut out), Err(StlError::Empty)));
        assert!(out.is_empty());
    }
}
