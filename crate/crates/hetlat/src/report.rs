//! JSON run reports.

use std::io::Write;

use hetlat_core::{MeshReport, TriangleMesh};
use serde::Serialize;

use crate::pipeline::Timings;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub triangles: usize,
    pub euler: i64,
    pub closed: bool,
    pub genus: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bbox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshSummary {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler: i64,
    pub genus: Option<i64>,
    pub components: Vec<ComponentSummary>,
    pub watertight: bool,
    pub boundary_edges: usize,
    pub non_manifold_edges: usize,
    pub misoriented_edges: usize,
    pub duplicate_vertices: usize,
    pub volume: f64,
    pub bbox: Bbox,
}

impl MeshSummary {
    /// Diagnostics plus a duplicate scan at `weld_eps`.
    pub fn new(mesh: &TriangleMesh, report: &MeshReport, weld_eps: f64) -> Self {
        MeshSummary {
            vertices: report.vertices,
            edges: report.edges,
            triangles: report.triangles,
            euler: report.euler,
            genus: report.genus,
            components: report
                .components
                .iter()
                .map(|c| ComponentSummary { triangles: c.triangles, euler: c.euler, closed: c.closed, genus: c.genus })
                .collect(),
            watertight: report.watertight,
            boundary_edges: report.boundary_edges,
            non_manifold_edges: report.non_manifold_edges,
            misoriented_edges: report.misoriented_edges,
            duplicate_vertices: mesh.near_duplicate_vertices(weld_eps),
            volume: report.signed_volume,
            bbox: Bbox { min: report.bounds.min.to_array(), max: report.bounds.max.to_array() },
        }
    }
}

/// Wall time per phase in seconds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseTimes {
    pub field_eval: f64,
    pub polygonize: f64,
    pub weld: f64,
    pub export: f64,
    pub total: f64,
}

impl From<&Timings> for PhaseTimes {
    fn from(t: &Timings) -> Self {
        PhaseTimes {
            field_eval: t.field_eval.as_secs_f64(),
            polygonize: t.polygonize.as_secs_f64(),
            weld: t.weld.as_secs_f64(),
            export: t.export.as_secs_f64(),
            total: t.total().as_secs_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub topology: String,
    pub kind: String,
    pub cells: [usize; 3],
    pub u: f64,
    pub mode: String,
    pub resolution: usize,
    pub threads: usize,
    pub output: Option<String>,
    pub format: String,
    pub mesh: MeshSummary,
    pub warnings: Vec<String>,
    pub timings: PhaseTimes,
}

pub fn write_report<W: Write, R: Serialize>(report: &R, mut sink: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut sink, report)?;
    writeln!(sink)?;
    sink.flush()
}
