use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::grid::{GridError, SampleGrid};
use super::mesh::TriangleMesh;
use super::table::{corner_offset, edge_axis, CaseTable, EDGES};
use crate::math::Vec3;
use crate::topology::ImplicitSolid;

/// Interpolation parameters are kept this far from the edge ends.
pub const EDGE_CLAMP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub enum MeshError {
    Grid(GridError),
    Unbounded,
    Empty,
    /// Neighbouring slabs disagreed on shared samples or vertices.
    Inconsistent(String),
    TooManyVertices(u64),
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshError::Grid(e) => e.fmt(f),
            MeshError::Unbounded => f.write_str("solid has no finite bounds"),
            MeshError::Empty => f.write_str("surface is empty at this resolution"),
            MeshError::Inconsistent(what) => write!(f, "internal consistency failure: {what}"),
            MeshError::TooManyVertices(n) => write!(f, "{n} vertices exceed 32-bit indexing"),
        }
    }
}

impl core::error::Error for MeshError {}

impl From<GridError> for MeshError {
    fn from(e: GridError) -> Self {
        MeshError::Grid(e)
    }
}

/// Samples on lattice planes `z0..=z1`, stored as `f32`, x fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSlab {
    pub z0: usize,
    pub z1: usize,
    nx: usize,
    ny: usize,
    values: Vec<f32>,
}

impl SampleSlab {
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f32 {
        self.values[((k - self.z0) * self.ny + j) * self.nx + i]
    }

    fn plane(&self, k: usize) -> &[f32] {
        let n = self.nx * self.ny;
        let s = (k - self.z0) * n;
        &self.values[s..s + n]
    }
}

fn to_sample(v: f64) -> f32 {
    if v.is_nan() {
        -f32::MAX
    } else {
        (v as f32).clamp(-f32::MAX, f32::MAX)
    }
}

/// Evaluate `solid` on planes `z0..=z1`.
pub fn sample_slab<S: ImplicitSolid + ?Sized>(
    solid: &S,
    grid: &SampleGrid,
    z0: usize,
    z1: usize,
) -> SampleSlab {
    let [nx, ny, _] = grid.dims();
    let mut values = Vec::with_capacity(nx * ny * (z1 - z0 + 1));
    for k in z0..=z1 {
        for j in 0..ny {
            for i in 0..nx {
                values.push(to_sample(solid.value(grid.point(i, j, k))));
            }
        }
    }
    SampleSlab { z0, z1, nx, ny, values }
}

/// Bitwise comparison of the planes shared by consecutive slabs.
pub fn check_seam(lower: &SampleSlab, upper: &SampleSlab) -> Result<(), MeshError> {
    if lower.z1 != upper.z0 {
        return Err(MeshError::Inconsistent(alloc::format!(
            "slabs {}..{} and {}..{} are not adjacent",
            lower.z0,
            lower.z1,
            upper.z0,
            upper.z1
        )));
    }
    let (a, b) = (lower.plane(lower.z1), upper.plane(upper.z0));
    match a.iter().zip(b).position(|(x, y)| x.to_bits() != y.to_bits()) {
        None => Ok(()),
        Some(n) => Err(MeshError::Inconsistent(alloc::format!(
            "sample {n} on plane {} differs between slabs",
            lower.z1
        ))),
    }
}

/// Triangles of one slab keyed by global vertex ids.
///
/// Ids below `3 * points` are lattice edges (`point * 3 + axis`); larger ids
/// are contour centres owned by a single voxel.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SurfacePatch {
    pub vertices: Vec<(u64, Vec3)>,
    pub triangles: Vec<[u64; 3]>,
}

/// Surface inside the voxel layers `slab.z0..slab.z1`.
pub fn polygonize_slab(table: &CaseTable, grid: &SampleGrid, slab: &SampleSlab) -> SurfacePatch {
    let [nx, ny, _] = grid.dims();
    let centre_base = grid.point_count() * 3;
    let mut patch = SurfacePatch::default();
    let mut ids = [0u64; 12];
    let mut loop_ids: Vec<u64> = Vec::new();
    for k in slab.z0..slab.z1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let mut vals = [0f32; 8];
                let mut mask = 0u8;
                for c in 0..8u8 {
                    let [di, dj, dk] = corner_offset(c);
                    let v = slab.get(i + di, j + dj, k + dk);
                    vals[c as usize] = v;
                    if v >= 0.0 {
                        mask |= 1 << c;
                    }
                }
                let contours = table.case(mask);
                if contours.is_empty() {
                    continue;
                }
                for (n, &(a, b)) in EDGES.iter().enumerate() {
                    if (mask >> a & 1) == (mask >> b & 1) {
                        continue;
                    }
                    let [ai, aj, ak] = corner_offset(a);
                    let (pi, pj, pk) = (i + ai, j + aj, k + ak);
                    let id = grid.index(pi, pj, pk) * 3 + edge_axis(n as u8) as u64;
                    ids[n] = id;
                    let (v0, v1) = (vals[a as usize] as f64, vals[b as usize] as f64);
                    let t = (v0 / (v0 - v1)).clamp(EDGE_CLAMP, 1.0 - EDGE_CLAMP);
                    let [bi, bj, bk] = corner_offset(b);
                    let p0 = grid.point(pi, pj, pk);
                    let p1 = grid.point(i + bi, j + bj, k + bk);
                    patch.vertices.push((id, p0 + (p1 - p0) * t));
                }
                let voxel = grid.index(i, j, k);
                for (n, c) in contours.iter().enumerate() {
                    loop_ids.clear();
                    loop_ids.extend(c.edges.iter().map(|&e| ids[e as usize]));
                    if c.centred {
                        let centre_id = centre_base + voxel * 4 + n as u64;
                        let mut sum = Vec3::ZERO;
                        for &e in &c.edges {
                            let id = ids[e as usize];
                            let pos = patch.vertices.iter().rev().find(|v| v.0 == id).unwrap().1;
                            sum += pos;
                        }
                        patch.vertices.push((centre_id, sum / c.edges.len() as f64));
                        for w in 0..loop_ids.len() {
                            let next = loop_ids[(w + 1) % loop_ids.len()];
                            patch.triangles.push([centre_id, loop_ids[w], next]);
                        }
                    } else {
                        for w in 1..loop_ids.len() - 1 {
                            patch.triangles.push([loop_ids[0], loop_ids[w], loop_ids[w + 1]]);
                        }
                    }
                }
            }
        }
    }
    patch
}

/// Merge patches into one indexed mesh; vertices are ordered by id.
pub fn weld(patches: &[SurfacePatch]) -> Result<TriangleMesh, MeshError> {
    let mut all: Vec<(u64, Vec3)> = patches.iter().flat_map(|p| p.vertices.iter().copied()).collect();
    all.sort_unstable_by_key(|v| v.0);
    let mut ids: Vec<u64> = Vec::with_capacity(all.len());
    let mut vertices: Vec<Vec3> = Vec::with_capacity(all.len());
    for (id, p) in all {
        if ids.last() == Some(&id) {
            let q = vertices.last().unwrap();
            let same = p.to_array().iter().zip(q.to_array()).all(|(a, b)| a.to_bits() == b.to_bits());
            if !same {
                return Err(MeshError::Inconsistent(alloc::format!(
                    "vertex {id} computed at two positions"
                )));
            }
            continue;
        }
        ids.push(id);
        vertices.push(p);
    }
    if vertices.len() as u64 > u32::MAX as u64 {
        return Err(MeshError::TooManyVertices(vertices.len() as u64));
    }
    let mut triangles = Vec::with_capacity(patches.iter().map(|p| p.triangles.len()).sum());
    for p in patches {
        for t in &p.triangles {
            let mut out = [0u32; 3];
            for (o, id) in out.iter_mut().zip(t) {
                *o = ids.binary_search(id).map_err(|_| {
                    MeshError::Inconsistent(alloc::format!("triangle references unknown vertex {id}"))
                })? as u32;
            }
            triangles.push(out);
        }
    }
    if triangles.is_empty() {
        return Err(MeshError::Empty);
    }
    Ok(TriangleMesh { vertices, triangles })
}

/// Single-threaded extraction with slabs of `layers` voxel layers.
pub fn polygonize<S: ImplicitSolid + ?Sized>(
    solid: &S,
    grid: &SampleGrid,
    layers: usize,
) -> Result<TriangleMesh, MeshError> {
    let table = CaseTable::new();
    let mut patches = Vec::new();
    let mut prev: Option<SampleSlab> = None;
    for (z0, z1) in grid.slabs(layers, None) {
        let slab = sample_slab(solid, grid, z0, z1);
        if let Some(p) = &prev {
            check_seam(p, &slab)?;
        }
        patches.push(polygonize_slab(&table, grid, &slab));
        prev = Some(slab);
    }
    weld(&patches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{Aabb, sqrt};
    use crate::topology::{FnSolid, Torus};
    use core::f64::consts::PI;

    fn ball(r: f64) -> FnSolid<impl Fn(Vec3) -> f64> {
        FnSolid { f: move |p: Vec3| r - p.length(), bounds: Some(Aabb::new(Vec3::splat(-r), Vec3::splat(r))) }
    }

    fn mesh_of<S: ImplicitSolid>(s: &S, h: f64, layers: usize) -> TriangleMesh {
        let grid = SampleGrid::covering(s.bounds().unwrap(), h, 1).unwrap();
        polygonize(s, &grid, layers).unwrap()
    }

    #[test]
    fn sphere_is_closed_genus_zero() {
        let m = mesh_of(&ball(1.0), 0.1, 4);
        let r = m.diagnostics().unwrap();
        assert!(r.watertight);
        assert_eq!(r.misoriented_edges, 0);
        assert_eq!(r.genus, Some(0));
        assert_eq!(r.components.len(), 1);
        let v = 4.0 / 3.0 * PI;
        assert!(r.signed_volume > 0.0);
        assert!((r.signed_volume - v).abs() / v < 0.02);
        for p in &m.vertices {
            assert!((p.length() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn slab_size_does_not_change_output() {
        let t = Torus::new(1.0, 0.4).unwrap();
        let a = mesh_of(&t, 0.07, 1);
        let b = mesh_of(&t, 0.07, 5);
        let c = mesh_of(&t, 0.07, 1000);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.diagnostics().unwrap().genus, Some(1));
    }

    #[test]
    fn empty_surface_is_an_error() {
        let s = FnSolid { f: |_p: Vec3| -1.0, bounds: Some(Aabb::new(Vec3::ZERO, Vec3::splat(1.0))) };
        let g = SampleGrid::covering(s.bounds.unwrap(), 0.25, 0).unwrap();
        assert_eq!(polygonize(&s, &g, 2), Err(MeshError::Empty));
    }

    #[test]
    fn seam_mismatch_is_detected() {
        let g = SampleGrid::covering(Aabb::new(Vec3::ZERO, Vec3::splat(1.0)), 0.25, 0).unwrap();
        let a = sample_slab(&ball(0.6), &g, 0, 2);
        let b = sample_slab(&ball(0.6), &g, 2, 4);
        assert!(check_seam(&a, &b).is_ok());
        let c = sample_slab(&ball(0.61), &g, 2, 4);
        assert!(matches!(check_seam(&a, &c), Err(MeshError::Inconsistent(_))));
    }

    #[test]
    fn saddle_configurations_stay_manifold() {
        // lattice of balls touching diagonally exercises every ambiguous case
        let s = FnSolid {
            f: |p: Vec3| {
                let q = |x: f64| x - crate::math::floor(x + 0.5);
                let (x, y, z) = (q(p.x), q(p.y), q(p.z));
                0.37 - sqrt(x * x + y * y + z * z)
            },
            bounds: Some(Aabb::new(Vec3::splat(0.01), Vec3::splat(2.99))),
        };
        let grid = SampleGrid::covering(s.bounds.unwrap(), 0.173, 0).unwrap();
        let m = polygonize(&s, &grid, 3).unwrap();
        let r = m.diagnostics().unwrap();
        assert_eq!(r.non_manifold_edges, 0);
        assert_eq!(r.misoriented_edges, 0);
    }
}
