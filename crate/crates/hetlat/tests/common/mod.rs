#![allow(dead_code)]

use std::path::{Path, PathBuf};

use hetlat::spec::{load_spec, LatticeSpec};

pub type Tri = [[f32; 3]; 3];

/// Minimal binary STL reader: header, count, then 50-byte records.
pub fn parse_binary(bytes: &[u8]) -> Result<Vec<Tri>, String> {
    if bytes.len() < 84 {
        return Err(format!("{} bytes is shorter than the header", bytes.len()));
    }
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() != 84 + 50 * n {
        return Err(format!("{n} triangles need {} bytes, file has {}", 84 + 50 * n, bytes.len()));
    }
    let f = |o: usize| f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let base = 84 + 50 * t + 12;
        let mut tri = [[0.0f32; 3]; 3];
        for (v, corner) in tri.iter_mut().enumerate() {
            for (a, c) in corner.iter_mut().enumerate() {
                *c = f(base + 12 * v + 4 * a);
            }
        }
        if bytes[84 + 50 * t + 48..84 + 50 * t + 50] != [0, 0] {
            return Err(format!("triangle {t} has a nonzero attribute"));
        }
        out.push(tri);
    }
    Ok(out)
}

/// Minimal ASCII STL reader; collects `vertex` lines in threes.
pub fn parse_ascii(text: &str) -> Result<Vec<Tri>, String> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some(l) if l.starts_with("solid") => {}
        other => return Err(format!("bad first line {other:?}")),
    }
    let mut verts = Vec::new();
    let mut ended = false;
    for l in lines {
        let mut words = l.split_whitespace();
        match words.next() {
            Some("vertex") => {
                let c: Vec<f32> = words.map(|w| w.parse::<f32>().map_err(|e| format!("{w}: {e}"))).collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(format!("vertex line `{l}`"));
                }
                verts.push([c[0], c[1], c[2]]);
            }
            Some("endsolid") => ended = true,
            Some("facet" | "outer" | "endloop" | "endfacet") => {}
            _ => return Err(format!("unexpected line `{l}`")),
        }
    }
    if !ended || verts.len() % 3 != 0 {
        return Err("truncated file".into());
    }
    Ok(verts.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
}

/// Order-independent key; triangles keep their winding up to rotation.
pub fn multiset(tris: &[Tri]) -> Vec<[[u32; 3]; 3]> {
    let mut keys: Vec<[[u32; 3]; 3]> = tris
        .iter()
        .map(|t| {
            let b = t.map(|v| v.map(f32::to_bits));
            (0..3).map(|s| [b[s], b[(s + 1) % 3], b[(s + 2) % 3]]).min().unwrap()
        })
        .collect();
    keys.sort_unstable();
    keys
}

pub fn spec(text: &str) -> LatticeSpec {
    load_spec(text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}
