//! Beam topologies of the unit cell `[0,u]^3`.
//!
//! Each entry is written in unit coordinates (`u = 1`) as the explicit list
//! of straight segments of its frame and scaled afterwards.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::graph::SkeletalGraph;
use crate::math::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BeamTopology {
    Cubic,
    Bcc,
    Fcc,
    SFcc,
    Bccz,
    Fccz,
    SFccz,
    Fbcc,
    SFbcc,
    SFbccz,
    Diamond,
    Rhombicuboctahedron,
    TruncatedCube,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TopologyError {
    UnknownName(alloc::string::String),
    TruncOutOfRange(f64),
    TruncRequired(BeamTopology),
    TruncNotAccepted(BeamTopology),
    NonPositiveCellSize(f64),
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::UnknownName(n) => {
                write!(f, "unknown topology '{n}'; valid ids: ")?;
                let ids: Vec<&str> = BeamTopology::ALL
                    .iter()
                    .map(|t| t.id())
                    .chain(super::TpmsKind::ALL.iter().map(|t| t.id()))
                    .collect();
                write!(f, "{}", ids.join(", "))
            }
            TopologyError::TruncOutOfRange(t) => write!(f, "truncation {t} is outside [0, 0.5]"),
            TopologyError::TruncRequired(t) => write!(f, "topology '{}' requires a truncation", t.id()),
            TopologyError::TruncNotAccepted(t) => {
                write!(f, "topology '{}' does not take a truncation", t.id())
            }
            TopologyError::NonPositiveCellSize(u) => write!(f, "unit cell size must be positive, got {u}"),
        }
    }
}

impl core::error::Error for TopologyError {}

impl BeamTopology {
    pub const ALL: [BeamTopology; 13] = [
        BeamTopology::Cubic,
        BeamTopology::Bcc,
        BeamTopology::Fcc,
        BeamTopology::SFcc,
        BeamTopology::Bccz,
        BeamTopology::Fccz,
        BeamTopology::SFccz,
        BeamTopology::Fbcc,
        BeamTopology::SFbcc,
        BeamTopology::SFbccz,
        BeamTopology::Diamond,
        BeamTopology::Rhombicuboctahedron,
        BeamTopology::TruncatedCube,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BeamTopology::Cubic => "cubic",
            BeamTopology::Bcc => "bcc",
            BeamTopology::Fcc => "fcc",
            BeamTopology::SFcc => "s_fcc",
            BeamTopology::Bccz => "bccz",
            BeamTopology::Fccz => "fccz",
            BeamTopology::SFccz => "s_fccz",
            BeamTopology::Fbcc => "fbcc",
            BeamTopology::SFbcc => "s_fbcc",
            BeamTopology::SFbccz => "s_fbccz",
            BeamTopology::Diamond => "diamond",
            BeamTopology::Rhombicuboctahedron => "rhombicuboctahedron",
            BeamTopology::TruncatedCube => "truncated_cube",
        }
    }

    pub fn takes_truncation(self) -> bool {
        matches!(self, BeamTopology::Rhombicuboctahedron | BeamTopology::TruncatedCube)
    }

    /// Frame of one cell of size `u`. `trunc` is a fraction of `u` in
    /// `[0, 0.5]`, required exactly for the truncated topologies.
    pub fn graph(self, u: f64, trunc: Option<f64>) -> Result<SkeletalGraph, TopologyError> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(TopologyError::NonPositiveCellSize(u));
        }
        let t = match (self.takes_truncation(), trunc) {
            (true, None) => return Err(TopologyError::TruncRequired(self)),
            (false, Some(_)) => return Err(TopologyError::TruncNotAccepted(self)),
            (true, Some(t)) if !(0.0..=0.5).contains(&t) => {
                return Err(TopologyError::TruncOutOfRange(t))
            }
            (_, t) => t.unwrap_or(0.0),
        };
        let segs: Vec<(Vec3, Vec3)> = self
            .unit_segments(t)
            .into_iter()
            .map(|(a, b)| (a * u, b * u))
            .collect();
        Ok(SkeletalGraph::from_segments(&segs, 1e-9 * u))
    }

    /// Constituents of composite entries, as unions.
    pub fn constituents(self) -> &'static [BeamTopology] {
        use BeamTopology::*;
        match self {
            Fcc => &[SFcc],
            Fbcc => &[Bcc, Fcc],
            SFbcc => &[Bcc, SFcc],
            SFbccz => &[Bcc, SFccz],
            _ => &[],
        }
    }

    fn unit_segments(self, t: f64) -> Vec<(Vec3, Vec3)> {
        use BeamTopology::*;
        let mut s = Vec::new();
        match self {
            Cubic => {
                for axis in 0..3 {
                    cube_edges(&mut s, axis, 0.0, 1.0);
                }
            }
            Bcc => body_diagonals(&mut s),
            SFcc => side_face_diagonals(&mut s),
            Fcc => {
                side_face_diagonals(&mut s);
                face_diagonals(&mut s, 2);
            }
            Bccz => {
                body_diagonals(&mut s);
                cube_edges(&mut s, 2, 0.0, 1.0);
            }
            Fccz => {
                side_face_diagonals(&mut s);
                face_diagonals(&mut s, 2);
                cube_edges(&mut s, 2, 0.0, 1.0);
            }
            SFccz => {
                side_face_diagonals(&mut s);
                cube_edges(&mut s, 2, 0.0, 1.0);
            }
            Fbcc => {
                body_diagonals(&mut s);
                side_face_diagonals(&mut s);
                face_diagonals(&mut s, 2);
            }
            SFbcc => {
                body_diagonals(&mut s);
                side_face_diagonals(&mut s);
            }
            SFbccz => {
                body_diagonals(&mut s);
                side_face_diagonals(&mut s);
                cube_edges(&mut s, 2, 0.0, 1.0);
            }
            Diamond => diamond(&mut s),
            Rhombicuboctahedron => {
                for axis in 0..3 {
                    for c in [t, 1.0 - t] {
                        octagon(&mut s, axis, c, t);
                    }
                }
            }
            TruncatedCube => {
                for axis in 0..3 {
                    for c in [0.0, 1.0] {
                        corner_cuts(&mut s, axis, c, t);
                    }
                    cube_edges(&mut s, axis, t, 1.0 - t);
                }
            }
        }
        s
    }
}

impl fmt::Display for BeamTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for BeamTopology {
    type Err = TopologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BeamTopology::ALL
            .iter()
            .copied()
            .find(|t| t.id() == s)
            .ok_or_else(|| TopologyError::UnknownName(s.into()))
    }
}

/// Point with coordinate `c` on `axis` and `(p, q)` on the other two axes,
/// in cyclic order.
fn on_plane(axis: usize, c: f64, p: f64, q: f64) -> Vec3 {
    match axis {
        0 => Vec3::new(c, p, q),
        1 => Vec3::new(q, c, p),
        _ => Vec3::new(p, q, c),
    }
}

/// Cube edges parallel to `axis`, trimmed to `[lo, hi]` along it.
fn cube_edges(s: &mut Vec<(Vec3, Vec3)>, axis: usize, lo: f64, hi: f64) {
    for p in [0.0, 1.0] {
        for q in [0.0, 1.0] {
            s.push((on_plane(axis, lo, p, q), on_plane(axis, hi, p, q)));
        }
    }
}

fn body_diagonals(s: &mut Vec<(Vec3, Vec3)>) {
    // x=y=z, -x+u=y=z, x=y=-z+u, -x+u=y=-z+u
    s.push((Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0)));
    s.push((Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 1.0)));
    s.push((Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 1.0, 0.0)));
    s.push((Vec3::new(1.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 0.0)));
}

/// Both diagonals of the two faces normal to `axis`.
fn face_diagonals(s: &mut Vec<(Vec3, Vec3)>, axis: usize) {
    for c in [0.0, 1.0] {
        s.push((on_plane(axis, c, 0.0, 0.0), on_plane(axis, c, 1.0, 1.0)));
        s.push((on_plane(axis, c, 1.0, 0.0), on_plane(axis, c, 0.0, 1.0)));
    }
}

/// Diagonals of the four vertical faces (no horizontal beams).
fn side_face_diagonals(s: &mut Vec<(Vec3, Vec3)>) {
    face_diagonals(s, 0);
    face_diagonals(s, 1);
}

/// Octagon in the plane `axis = c` whose corners are cut by `t`.
fn octagon(s: &mut Vec<(Vec3, Vec3)>, axis: usize, c: f64, t: f64) {
    let ring = [
        (0.0, t),
        (t, 0.0),
        (1.0 - t, 0.0),
        (1.0, t),
        (1.0, 1.0 - t),
        (1.0 - t, 1.0),
        (t, 1.0),
        (0.0, 1.0 - t),
    ];
    for i in 0..ring.len() {
        let (p0, q0) = ring[i];
        let (p1, q1) = ring[(i + 1) % ring.len()];
        s.push((on_plane(axis, c, p0, q0), on_plane(axis, c, p1, q1)));
    }
}

/// The four corner cuts of the cube face `axis = c`.
fn corner_cuts(s: &mut Vec<(Vec3, Vec3)>, axis: usize, c: f64, t: f64) {
    let cuts = [
        ((t, 0.0), (0.0, t)),
        ((1.0 - t, 0.0), (1.0, t)),
        ((0.0, 1.0 - t), (t, 1.0)),
        ((1.0 - t, 1.0), (1.0, 1.0 - t)),
    ];
    for ((p0, q0), (p1, q1)) in cuts {
        s.push((on_plane(axis, c, p0, q0), on_plane(axis, c, p1, q1)));
    }
}

/// Four tetrahedral junctions, each with four beams, stacked in quarter
/// slabs along z.
fn diamond(s: &mut Vec<(Vec3, Vec3)>) {
    let v = Vec3::new;
    let junctions = [
        (v(0.75, 0.25, 0.25), [v(1.0, 0.0, 0.0), v(0.5, 0.5, 0.0), v(0.5, 0.0, 0.5), v(1.0, 0.5, 0.5)]),
        (v(0.25, 0.75, 0.25), [v(0.5, 0.5, 0.0), v(0.0, 1.0, 0.0), v(0.5, 1.0, 0.5), v(0.0, 0.5, 0.5)]),
        (v(0.25, 0.25, 0.75), [v(0.5, 0.0, 0.5), v(0.0, 0.5, 0.5), v(0.0, 0.0, 1.0), v(0.5, 0.5, 1.0)]),
        (v(0.75, 0.75, 0.75), [v(1.0, 0.5, 0.5), v(0.5, 1.0, 0.5), v(0.5, 0.5, 1.0), v(1.0, 1.0, 1.0)]),
    ];
    for (centre, ends) in junctions {
        for e in ends {
            s.push((e, centre));
        }
    }
}
