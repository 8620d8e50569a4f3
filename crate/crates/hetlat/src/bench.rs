//! Desk-scale timing of lattice generation across cell counts.

use std::io::Write;

use hetlat_core::field::CellTopology;
use hetlat_core::{BeamTopology, Expr, ParamKey, ParameterField, ProfileShape, TpmsKind};
use serde::Serialize;

use crate::spec::LatticeSpec;
use crate::stl::StlFormat;
use crate::{build, Error};

/// Largest lattice benchmarked without an explicit opt-in.
pub const DEFAULT_CELL_CAP: usize = 64;

/// Cells per axis for the 1, 8, 27 and 64 cell runs.
pub const DEFAULT_SIZES: [usize; 4] = [1, 2, 3, 4];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub specs: Vec<LatticeSpec>,
    pub sizes: Vec<usize>,
    pub resolution: Option<usize>,
    pub threads: usize,
    pub repeats: usize,
    pub allow_large: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub topology: String,
    pub cells: usize,
    pub resolution: usize,
    pub threads: usize,
    pub seconds: f64,
    pub per_cell: f64,
    pub field_eval: f64,
    pub polygonize: f64,
    pub weld: f64,
    pub triangles: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{cells} cells exceed the benchmark cap of {cap}; pass --allow-large to run anyway")]
    TooLarge { cells: usize, cap: usize },
    #[error(transparent)]
    Run(#[from] Error),
}

fn spec(topology: CellTopology, u: f64, key: ParamKey, value: &str, resolution: usize) -> LatticeSpec {
    let mut params = ParameterField::new();
    params.set(key, Expr::parse(value).expect("valid literal")).expect("known key");
    LatticeSpec {
        topology,
        u,
        counts: [1, 1, 1],
        profile: ProfileShape::Circle,
        params,
        mode: Default::default(),
        resolution,
        inner_radius: None,
        format: StlFormat::Binary,
    }
}

/// Cubic beams (u = 10, D = 1) and a gyroid shell (u = 20, t = 2).
pub fn default_specs(resolution: usize) -> Vec<LatticeSpec> {
    vec![
        spec(CellTopology::Beam(BeamTopology::Cubic), 10.0, ParamKey::BeamDiameter, "1", resolution),
        spec(CellTopology::Tpms(TpmsKind::Gyroid), 20.0, ParamKey::Thickness, "2", resolution),
    ]
}

pub fn run(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::new();
    for base in &config.specs {
        for &n in &config.sizes {
            let cells = n * n * n;
            if cells > DEFAULT_CELL_CAP && !config.allow_large {
                return Err(BenchError::TooLarge { cells, cap: DEFAULT_CELL_CAP });
            }
            let mut s = base.clone();
            s.counts = [n, n, n];
            if let Some(r) = config.resolution {
                s.resolution = r;
            }
            let mut best: Option<BenchRow> = None;
            for _ in 0..config.repeats.max(1) {
                let built = build(&s, config.threads)?;
                let t = &built.timings;
                let seconds = t.total().as_secs_f64();
                let row = BenchRow {
                    topology: s.topology.id().into(),
                    cells,
                    resolution: s.resolution,
                    threads: config.threads,
                    seconds,
                    per_cell: seconds / cells as f64,
                    field_eval: t.field_eval.as_secs_f64(),
                    polygonize: t.polygonize.as_secs_f64(),
                    weld: t.weld.as_secs_f64(),
                    triangles: built.mesh.triangles.len(),
                };
                if best.as_ref().is_none_or(|b| row.seconds < b.seconds) {
                    best = Some(row);
                }
            }
            rows.extend(best);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], sink: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
