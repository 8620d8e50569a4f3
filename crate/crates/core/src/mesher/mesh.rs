use alloc::vec::Vec;

use crate::math::{Aabb, Vec3};

/// Indexed triangle mesh with counter-clockwise (outward) winding.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

/// Per connected sheet (triangles linked through shared edges).
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentReport {
    pub triangles: usize,
    pub euler: i64,
    pub closed: bool,
    /// `(2 - euler) / 2`, only for closed sheets.
    pub genus: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshReport {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler: i64,
    pub components: Vec<ComponentReport>,
    /// Sum of component genera when every component is closed.
    pub genus: Option<i64>,
    pub boundary_edges: usize,
    /// Edges with more than two incident triangles.
    pub non_manifold_edges: usize,
    /// Two-triangle edges traversed in the same direction by both.
    pub misoriented_edges: usize,
    pub watertight: bool,
    pub signed_volume: f64,
    pub bounds: Aabb,
}

impl TriangleMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]]
    }

    /// Unit normal from the winding, or zero for degenerate triangles.
    pub fn face_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangle(t);
        (b - a).cross(c - a).normalized().unwrap_or(Vec3::ZERO)
    }

    /// Divergence-theorem volume; positive for outward winding.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle(t);
                a.dot(b.cross(c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::empty();
        for v in &self.vertices {
            b.include(*v);
        }
        b
    }

    /// Pairs of distinct vertices closer than `eps`.
    pub fn near_duplicate_vertices(&self, eps: f64) -> usize {
        let mut order: Vec<u32> = (0..self.vertices.len() as u32).collect();
        order.sort_by(|&a, &b| {
            self.vertices[a as usize].x.partial_cmp(&self.vertices[b as usize].x).unwrap()
        });
        let mut count = 0;
        for (n, &i) in order.iter().enumerate() {
            let p = self.vertices[i as usize];
            for &j in &order[n + 1..] {
                let q = self.vertices[j as usize];
                if q.x - p.x > eps {
                    break;
                }
                if p.distance(q) < eps {
                    count += 1;
                }
            }
        }
        count
    }

    /// Topological and metric summary; `None` for an empty mesh.
    pub fn diagnostics(&self) -> Option<MeshReport> {
        if self.is_empty() {
            return None;
        }
        // (lo, hi, triangle, forward)
        let mut half: Vec<(u32, u32, u32, bool)> = Vec::with_capacity(self.triangles.len() * 3);
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                half.push((a.min(b), a.max(b), t as u32, a < b));
            }
        }
        half.sort_unstable();

        let nt = self.triangles.len();
        let mut parent: Vec<u32> = (0..nt as u32).collect();
        let mut edges = 0;
        let mut boundary = 0;
        let mut non_manifold = 0;
        let mut misoriented = 0;
        // boundary/non-manifold edges per triangle, to flag open sheets
        let mut open_edge = alloc::vec![false; nt];
        let mut i = 0;
        while i < half.len() {
            let mut j = i + 1;
            while j < half.len() && half[j].0 == half[i].0 && half[j].1 == half[i].1 {
                j += 1;
            }
            edges += 1;
            match j - i {
                1 => {
                    boundary += 1;
                    open_edge[half[i].2 as usize] = true;
                }
                2 => {
                    if half[i].3 == half[i + 1].3 {
                        misoriented += 1;
                    }
                }
                _ => {
                    non_manifold += 1;
                    for h in &half[i..j] {
                        open_edge[h.2 as usize] = true;
                    }
                }
            }
            for h in &half[i + 1..j] {
                union(&mut parent, half[i].2, h.2);
            }
            i = j;
        }

        // Euler characteristic per sheet.
        let root_of: Vec<u32> = (0..nt as u32).map(|t| find(&mut parent, t)).collect();
        let mut roots: Vec<u32> = root_of.clone();
        roots.sort_unstable();
        roots.dedup();
        let slot = |r: u32| roots.binary_search(&r).unwrap();
        let mut faces = alloc::vec![0i64; roots.len()];
        let mut open = alloc::vec![false; roots.len()];
        for t in 0..nt {
            let c = slot(root_of[t]);
            faces[c] += 1;
            open[c] |= open_edge[t];
        }
        let mut edge_count = alloc::vec![0i64; roots.len()];
        let mut i = 0;
        while i < half.len() {
            let mut j = i + 1;
            while j < half.len() && half[j].0 == half[i].0 && half[j].1 == half[i].1 {
                j += 1;
            }
            edge_count[slot(root_of[half[i].2 as usize])] += 1;
            i = j;
        }
        let mut vert_comp: Vec<(u32, usize)> = Vec::with_capacity(nt * 3);
        for (t, tri) in self.triangles.iter().enumerate() {
            let c = slot(root_of[t]);
            for &v in tri {
                vert_comp.push((v, c));
            }
        }
        vert_comp.sort_unstable();
        vert_comp.dedup();
        let mut vert_count = alloc::vec![0i64; roots.len()];
        for &(_, c) in &vert_comp {
            vert_count[c] += 1;
        }

        let components: Vec<ComponentReport> = (0..roots.len())
            .map(|c| {
                let euler = vert_count[c] - edge_count[c] + faces[c];
                let closed = !open[c];
                ComponentReport {
                    triangles: faces[c] as usize,
                    euler,
                    closed,
                    genus: (closed && euler % 2 == 0).then_some((2 - euler) / 2),
                }
            })
            .collect();
        let genus = components.iter().map(|c| c.genus).sum::<Option<i64>>();

        let mut used: Vec<u32> = self.triangles.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();

        let watertight = boundary == 0 && non_manifold == 0;
        Some(MeshReport {
            vertices: used.len(),
            edges,
            triangles: nt,
            euler: used.len() as i64 - edges as i64 + nt as i64,
            components,
            genus,
            boundary_edges: boundary,
            non_manifold_edges: non_manifold,
            misoriented_edges: misoriented,
            watertight,
            signed_volume: self.signed_volume(),
            bounds: self.bounds(),
        })
    }
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        parent[i as usize] = parent[parent[i as usize] as usize];
        i = parent[i as usize];
    }
    i
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb) as usize] = ra.min(rb);
    }
}
