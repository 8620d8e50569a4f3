use alloc::vec::Vec;

use crate::math::{Aabb, Vec3};

/// Straight-segment frame of a unit cell.
///
/// Built through [`SkeletalGraph::from_segments`], which welds coincident
/// points and splits segments wherever they touch or cross, so that the
/// graph's cycle rank matches the handle count of its thickened solid.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletalGraph {
    vertices: Vec<Vec3>,
    edges: Vec<[usize; 2]>,
    node_vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    EdgeOutOfRange { edge: usize },
    DegenerateEdge { edge: usize },
    NodeOutOfRange { node: usize },
}

impl core::fmt::Display for GraphError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GraphError::EdgeOutOfRange { edge } => write!(f, "edge {edge} references a missing vertex"),
            GraphError::DegenerateEdge { edge } => write!(f, "edge {edge} has zero length"),
            GraphError::NodeOutOfRange { node } => write!(f, "node {node} references a missing vertex"),
        }
    }
}

impl core::error::Error for GraphError {}

impl SkeletalGraph {
    /// Graph with explicit connectivity. No splitting is performed.
    pub fn new(
        vertices: Vec<Vec3>,
        edges: Vec<[usize; 2]>,
        node_vertices: Vec<usize>,
    ) -> Result<Self, GraphError> {
        for (i, e) in edges.iter().enumerate() {
            if e[0] >= vertices.len() || e[1] >= vertices.len() {
                return Err(GraphError::EdgeOutOfRange { edge: i });
            }
            if e[0] == e[1] || vertices[e[0]].distance(vertices[e[1]]) == 0.0 {
                return Err(GraphError::DegenerateEdge { edge: i });
            }
        }
        if let Some(&node) = node_vertices.iter().find(|&&n| n >= vertices.len()) {
            return Err(GraphError::NodeOutOfRange { node });
        }
        Ok(SkeletalGraph { vertices, edges, node_vertices })
    }

    /// Normalized graph from raw segments; every vertex carries a node.
    ///
    /// `tol` is the welding distance. Segments shorter than `tol` vanish,
    /// points closer than `tol` merge, and a segment passing within `tol` of
    /// a vertex or of another segment is split there.
    pub fn from_segments(segments: &[(Vec3, Vec3)], tol: f64) -> Self {
        let segs: Vec<(Vec3, Vec3)> = segments
            .iter()
            .copied()
            .filter(|(a, b)| a.distance(*b) > tol)
            .collect();

        let mut cuts: Vec<Vec<f64>> = segs.iter().map(|_| alloc::vec![0.0, 1.0]).collect();
        for i in 0..segs.len() {
            for j in 0..segs.len() {
                if i == j {
                    continue;
                }
                let (a, b) = segs[i];
                let (c, d) = segs[j];
                for p in [c, d] {
                    if let Some(t) = interior_param(a, b, p, tol) {
                        cuts[i].push(t);
                    }
                }
                if j > i {
                    if let Some((s, t)) = crossing(a, b, c, d, tol) {
                        cuts[i].push(s);
                        cuts[j].push(t);
                    }
                }
            }
        }

        let mut vertices: Vec<Vec3> = Vec::new();
        let intern = |p: Vec3, vertices: &mut Vec<Vec3>| -> usize {
            if let Some(i) = vertices.iter().position(|v| v.distance(p) <= tol) {
                i
            } else {
                vertices.push(p);
                vertices.len() - 1
            }
        };

        // Endpoints first so corner vertices get the low indices.
        for (a, b) in &segs {
            intern(*a, &mut vertices);
            intern(*b, &mut vertices);
        }

        let mut edges: Vec<[usize; 2]> = Vec::new();
        for ((a, b), ts) in segs.iter().zip(cuts.iter_mut()) {
            ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let ids: Vec<usize> = ts
                .iter()
                .map(|&t| intern(*a + (*b - *a) * t, &mut vertices))
                .collect();
            for w in ids.windows(2) {
                if w[0] != w[1] {
                    let e = [w[0].min(w[1]), w[0].max(w[1])];
                    if !edges.contains(&e) {
                        edges.push(e);
                    }
                }
            }
        }

        let node_vertices = (0..vertices.len()).collect();
        SkeletalGraph { vertices, edges, node_vertices }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Vertices that carry a spherical node.
    pub fn node_vertices(&self) -> &[usize] {
        &self.node_vertices
    }

    pub fn with_node_vertices(mut self, nodes: Vec<usize>) -> Self {
        self.node_vertices = nodes;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn segment(&self, edge: usize) -> (Vec3, Vec3) {
        let [a, b] = self.edges[edge];
        (self.vertices[a], self.vertices[b])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        (0..self.edges.len()).map(|e| self.segment(e))
    }

    /// Number of connected components (isolated vertices count).
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut count = self.vertices.len();
        for &[a, b] in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                count -= 1;
            }
        }
        count
    }

    /// First Betti number `E - V + C`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::empty();
        for v in &self.vertices {
            b.include(*v);
        }
        b
    }

    /// Same graph with every vertex moved by `f`.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> SkeletalGraph {
        SkeletalGraph {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            edges: self.edges.clone(),
            node_vertices: self.node_vertices.clone(),
        }
    }

    /// Edge set as sorted coordinate pairs, for order-independent comparison.
    pub fn canonical_segments(&self) -> Vec<[[f64; 3]; 2]> {
        let mut out: Vec<[[f64; 3]; 2]> = self
            .segments()
            .map(|(a, b)| {
                let (a, b) = (a.to_array(), b.to_array());
                if lex_less(&a, &b) { [a, b] } else { [b, a] }
            })
            .collect();
        out.sort_by(cmp_pair);
        out
    }
}

fn lex_less(a: &[f64; 3], b: &[f64; 3]) -> bool {
    a.partial_cmp(b) == Some(core::cmp::Ordering::Less)
}

fn cmp_pair(x: &[[f64; 3]; 2], y: &[[f64; 3]; 2]) -> core::cmp::Ordering {
    x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal)
}

/// Parameter of `p` on segment `ab` when `p` lies strictly inside it.
fn interior_param(a: Vec3, b: Vec3, p: Vec3, tol: f64) -> Option<f64> {
    let d = b - a;
    let len2 = d.dot(d);
    let t = (p - a).dot(d) / len2;
    let len = crate::math::sqrt(len2);
    if t * len <= tol || (1.0 - t) * len <= tol {
        return None;
    }
    if (a + d * t).distance(p) <= tol {
        Some(t)
    } else {
        None
    }
}

/// Interior crossing parameters of two non-parallel segments.
fn crossing(a: Vec3, b: Vec3, c: Vec3, d: Vec3, tol: f64) -> Option<(f64, f64)> {
    let u = b - a;
    let v = d - c;
    let w = a - c;
    let (uu, uv, vv) = (u.dot(u), u.dot(v), v.dot(v));
    let (uw, vw) = (u.dot(w), v.dot(w));
    let denom = uu * vv - uv * uv;
    if denom <= 1e-12 * uu * vv {
        return None;
    }
    let s = (uv * vw - vv * uw) / denom;
    let t = (uu * vw - uv * uw) / denom;
    let (lu, lv) = (crate::math::sqrt(uu), crate::math::sqrt(vv));
    let inside = |p: f64, len: f64| p * len > tol && (1.0 - p) * len > tol;
    if !inside(s, lu) || !inside(t, lv) {
        return None;
    }
    if (a + u * s).distance(c + v * t) <= tol {
        Some((s, t))
    } else {
        None
    }
}
