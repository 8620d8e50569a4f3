//! Marching-cubes case table built from face rules.
//!
//! Corner `c` sits at `(c & 1, c >> 1 & 1, c >> 2 & 1)`. On every face the
//! inside corners are kept apart, which makes neighbouring cubes agree on
//! shared faces without a lookup into a hand-written table.

use alloc::vec::Vec;

use crate::math::Vec3;

/// Corner pairs for the 12 cube edges, grouped by axis.
pub const EDGES: [(u8, u8); 12] = build_edges();

const fn build_edges() -> [(u8, u8); 12] {
    let mut out = [(0u8, 0u8); 12];
    let mut axis = 0;
    while axis < 3 {
        let mut n = 0;
        let mut c = 0u8;
        while c < 8 {
            if c & (1 << axis) == 0 {
                out[axis * 4 + n] = (c, c | (1 << axis));
                n += 1;
            }
            c += 1;
        }
        axis += 1;
    }
    out
}

pub fn edge_axis(e: u8) -> usize {
    e as usize / 4
}

fn edge_between(a: u8, b: u8) -> u8 {
    let (lo, hi) = (a.min(b), a.max(b));
    EDGES.iter().position(|&(p, q)| p == lo && q == hi).unwrap() as u8
}

/// Corner position in the unit cube.
pub fn corner_offset(c: u8) -> [usize; 3] {
    [(c & 1) as usize, (c >> 1 & 1) as usize, (c >> 2 & 1) as usize]
}

/// Corners of each face, counter-clockwise seen from outside the cube.
fn faces() -> [[u8; 4]; 6] {
    let mut out = [[0u8; 4]; 6];
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        for s in 0..2u8 {
            let mut ring = [0u8; 4];
            for (n, (pb, pc)) in [(0u8, 0u8), (1, 0), (1, 1), (0, 1)].into_iter().enumerate() {
                ring[n] = (s << a) | (pb << b) | (pc << c);
            }
            if s == 0 {
                ring.reverse();
            }
            out[a * 2 + s as usize] = ring;
        }
    }
    out
}

/// One closed contour inside a cube.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub edges: Vec<u8>,
    /// Triangulate around an added centre vertex instead of a fan.
    pub centred: bool,
}

#[derive(Clone, Debug)]
pub struct CaseTable {
    cases: Vec<Vec<Contour>>,
}

impl CaseTable {
    pub fn new() -> Self {
        let faces = faces();
        let mut cases: Vec<Vec<Contour>> = (0..256u16).map(|m| contours(m as u8, &faces)).collect();
        if !outward(&cases[1]) {
            for case in &mut cases {
                for c in case.iter_mut() {
                    c.edges.reverse();
                }
            }
        }
        CaseTable { cases }
    }

    /// Contours for an inside-corner mask.
    pub fn case(&self, mask: u8) -> &[Contour] {
        &self.cases[mask as usize]
    }
}

impl Default for CaseTable {
    fn default() -> Self {
        Self::new()
    }
}

fn contours(mask: u8, faces: &[[u8; 4]; 6]) -> Vec<Contour> {
    let inside = |c: u8| mask >> c & 1 == 1;
    let mut next = [u8::MAX; 12];
    // face index of the segment leaving each edge
    let mut via = [u8::MAX; 12];
    for (f, ring) in faces.iter().enumerate() {
        let crossed: Vec<(u8, bool)> = (0..4)
            .filter_map(|i| {
                let (a, b) = (ring[i], ring[(i + 1) % 4]);
                (inside(a) != inside(b)).then(|| (edge_between(a, b), inside(b)))
            })
            .collect();
        // pair each entry with the following exit
        for (n, &(e, entry)) in crossed.iter().enumerate() {
            if entry {
                let exit = crossed[(n + 1) % crossed.len()].0;
                next[e as usize] = exit;
                via[e as usize] = f as u8;
            }
        }
    }

    let mut seen = [false; 12];
    let mut out = Vec::new();
    for start in 0..12u8 {
        if next[start as usize] == u8::MAX || seen[start as usize] {
            continue;
        }
        let mut edges = Vec::new();
        let mut face_hits = [0u8; 6];
        let mut e = start;
        while !seen[e as usize] {
            seen[e as usize] = true;
            edges.push(e);
            face_hits[via[e as usize] as usize] += 1;
            e = next[e as usize];
        }
        let centred = edges.len() > 3 && face_hits.iter().any(|&h| h > 1);
        out.push(Contour { edges, centred });
    }
    out
}

fn midpoint(e: u8) -> Vec3 {
    let (a, b) = EDGES[e as usize];
    let (pa, pb) = (corner_offset(a), corner_offset(b));
    Vec3::new(
        (pa[0] + pb[0]) as f64 / 2.0,
        (pa[1] + pb[1]) as f64 / 2.0,
        (pa[2] + pb[2]) as f64 / 2.0,
    )
}

/// Whether the single-corner case faces away from its inside corner.
fn outward(case: &[Contour]) -> bool {
    let e = &case[0].edges;
    let (a, b, c) = (midpoint(e[0]), midpoint(e[1]), midpoint(e[2]));
    (b - a).cross(c - a).dot(Vec3::splat(1.0)) > 0.0
}
