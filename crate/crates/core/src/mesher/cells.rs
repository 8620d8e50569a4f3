//! Unit-cell solids: thickened skeletal graphs and TPMS shells.

use alloc::vec::Vec;

use crate::math::{abs, Aabb, Vec3};
use crate::section::Profile;
use crate::topology::{SkeletalGraph, TpmsSurface};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Beam {
    start: Vec3,
    dir: Vec3,
    len: f64,
    e1: Vec3,
    e2: Vec3,
    lo: Vec3,
    hi: Vec3,
}

impl Beam {
    fn new(a: Vec3, b: Vec3) -> Option<Beam> {
        let len = a.distance(b);
        let dir = (b - a).normalized()?;
        let reference = if abs(dir.z) < 0.9 { Vec3::Z } else { Vec3::X };
        let e1 = (reference - dir * reference.dot(dir)).normalized()?;
        let e2 = dir.cross(e1);
        Some(Beam { start: a, dir, len, e1, e2, lo: a.min(b), hi: a.max(b) })
    }

    #[inline]
    fn value(&self, p: Vec3, profile: &Profile) -> f64 {
        let d = p - self.start;
        let s = d.dot(self.dir);
        let cross = profile.inside(d.dot(self.e1), d.dot(self.e2));
        cross.min(s).min(self.len - s)
    }
}

#[inline]
fn near(p: Vec3, lo: Vec3, hi: Vec3, reach: f64) -> bool {
    p.x >= lo.x - reach
        && p.x <= hi.x + reach
        && p.y >= lo.y - reach
        && p.y <= hi.y + reach
        && p.z >= lo.z - reach
        && p.z <= hi.z + reach
}

/// Union of flat-capped beams along the graph edges and spheres on its nodes.
///
/// Primitives farther than their own size plus `margin` from the query point
/// are skipped. The sign of the field stays exact and values close to the
/// surface are unaffected.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamCell {
    beams: Vec<Beam>,
    nodes: Vec<Vec3>,
    lo: Vec3,
    hi: Vec3,
    margin: f64,
}

impl BeamCell {
    /// Cell from a graph already placed in world coordinates.
    pub fn new(graph: &SkeletalGraph, margin: f64) -> Self {
        let beams: Vec<Beam> = graph.segments().filter_map(|(a, b)| Beam::new(a, b)).collect();
        let nodes: Vec<Vec3> = graph.node_vertices().iter().map(|&i| graph.vertices()[i]).collect();
        let b = graph.bounds();
        BeamCell { beams, nodes, lo: b.min, hi: b.max, margin: margin.max(0.0) }
    }

    pub fn beam_count(&self) -> usize {
        self.beams.len()
    }

    /// Skeleton bounds grown by the largest primitive radius.
    pub fn bounds(&self, profile: &Profile, node_radius: f64) -> Aabb {
        Aabb::new(self.lo, self.hi).expanded(profile.bound().max(node_radius))
    }

    pub fn value(&self, p: Vec3, profile: &Profile, node_radius: f64) -> f64 {
        let reach = profile.bound().max(node_radius) + self.margin;
        if !near(p, self.lo, self.hi, reach) {
            return -reach;
        }
        let mut best = -reach;
        for b in &self.beams {
            if near(p, b.lo, b.hi, reach) {
                best = best.max(b.value(p, profile));
            }
        }
        if node_radius > 0.0 {
            for &c in &self.nodes {
                if near(p, c, c, reach) {
                    best = best.max(node_radius - p.distance(c));
                }
            }
        }
        best
    }
}

/// Shell of thickness `t` around a TPMS, clipped to a box:
/// `min(t/2 - |f| / |grad f|, box)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TpmsCell {
    surface: TpmsSurface,
    clip: Aabb,
}

/// Below this gradient norm the raw level-set value is used.
pub const GRADIENT_FLOOR: f64 = 1e-12;

impl TpmsCell {
    pub fn new(surface: TpmsSurface, clip: Aabb) -> Self {
        TpmsCell { surface, clip }
    }

    pub fn surface(&self) -> &TpmsSurface {
        &self.surface
    }

    /// Unclipped shell value.
    pub fn shell(&self, p: Vec3, thickness: f64) -> f64 {
        let f = self.surface.value(p);
        let g = self.surface.gradient(p).length();
        if g < GRADIENT_FLOOR {
            thickness / 2.0 - abs(f)
        } else {
            thickness / 2.0 - abs(f) / g
        }
    }

    pub fn value(&self, p: Vec3, thickness: f64) -> f64 {
        let (lo, hi) = (self.clip.min, self.clip.max);
        let inside_box = (p.x - lo.x)
            .min(hi.x - p.x)
            .min(p.y - lo.y)
            .min(hi.y - p.y)
            .min(p.z - lo.z)
            .min(hi.z - p.z);
        self.shell(p, thickness).min(inside_box)
    }
}
