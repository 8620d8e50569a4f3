//! Spec files, parallel meshing, STL export and reporting on top of
//! `hetlat-core`.

pub mod bench;
pub mod pipeline;
pub mod report;
pub mod spec;
pub mod stl;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hetlat_core::field::{compose, FieldError};
use hetlat_core::mesher::{AssembleError, MeshError};
use hetlat_core::{FieldMode, LatticeField, TriangleMesh};

use crate::pipeline::{mesh_lattice, PipelineError, Timings};
use crate::report::{MeshSummary, PhaseTimes, RunReport};
use crate::spec::{LatticeSpec, SpecError};
use crate::stl::{StlError, StlFormat};

/// Weld tolerance relative to the cell size.
pub const WELD_EPS: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("meshing failed: {0}")]
    Pipeline(#[from] PipelineError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Stl { path: PathBuf, source: StlError },
}

/// Process exit codes per error class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const SPEC: u8 = 3;
    pub const EXPRESSION: u8 = 4;
    pub const PARAMETER: u8 = 5;
    pub const MESH: u8 = 6;
    pub const IO: u8 = 7;
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Spec(SpecError::Expression { .. }) => exit::EXPRESSION,
            Error::Spec(SpecError::Field(e)) if e.is_expression_error() => exit::EXPRESSION,
            Error::Spec(_) => exit::SPEC,
            Error::Field(e) if e.is_expression_error() => exit::EXPRESSION,
            Error::Field(e) if e.is_parameter_error() => exit::PARAMETER,
            Error::Field(_) => exit::SPEC,
            Error::Pipeline(PipelineError::Assemble(AssembleError::Resolution { .. })) => exit::SPEC,
            Error::Pipeline(_) => exit::MESH,
            Error::Io { .. } => exit::IO,
            Error::Stl { source: StlError::Empty, .. } => exit::MESH,
            Error::Stl { .. } => exit::IO,
        }
    }
}

/// Command-line adjustments applied on top of a loaded spec.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub resolution: Option<usize>,
    pub format: Option<StlFormat>,
    pub mode: Option<FieldMode>,
}

impl Overrides {
    pub fn apply(&self, mut spec: LatticeSpec) -> Result<LatticeSpec, Error> {
        if let Some(r) = self.resolution {
            let min = hetlat_core::mesher::MIN_LATTICE_RESOLUTION;
            if r < min {
                return Err(SpecError::Schema {
                    path: "resolution".into(),
                    message: format!("must be at least {min}, got {r}"),
                }
                .into());
            }
            spec.resolution = r;
        }
        if let Some(f) = self.format {
            spec.format = f;
        }
        if let Some(m) = self.mode {
            spec.mode = m;
        }
        Ok(spec)
    }
}

pub fn read_spec(path: &Path) -> Result<LatticeSpec, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    Ok(spec::load_spec(&text)?)
}

/// Compose the spec's field; all per-cell parameters are validated here.
pub fn compose_spec(spec: &LatticeSpec) -> Result<LatticeField, Error> {
    Ok(compose(spec.lattice_config()?)?)
}

pub struct Built {
    pub field: LatticeField,
    pub mesh: TriangleMesh,
    pub timings: Timings,
}

pub fn build(spec: &LatticeSpec, threads: usize) -> Result<Built, Error> {
    let t = Instant::now();
    let field = compose_spec(spec)?;
    let compose_time = t.elapsed();
    let (mesh, mut timings) = mesh_lattice(&field, spec.resolution, threads)?;
    timings.field_eval += compose_time;
    if mesh.is_empty() {
        return Err(PipelineError::Mesh(MeshError::Empty).into());
    }
    Ok(Built { field, mesh, timings })
}

pub fn run_report(spec: &LatticeSpec, built: &Built, threads: usize, output: Option<&Path>) -> RunReport {
    let diag = built.mesh.diagnostics().expect("non-empty mesh");
    RunReport {
        topology: spec.topology.id().into(),
        kind: spec.topology.kind().into(),
        cells: spec.counts,
        u: spec.u,
        mode: spec.mode.id().into(),
        resolution: spec.resolution,
        threads,
        output: output.map(|p| p.display().to_string()),
        format: spec.format.id().into(),
        mesh: MeshSummary::new(&built.mesh, &diag, spec.u * WELD_EPS),
        warnings: built.field.warnings().iter().map(|w| w.to_string()).collect(),
        timings: PhaseTimes::from(&built.timings),
    }
}

/// Write the mesh in the spec's format. Nothing is created on error.
pub fn export(mesh: &TriangleMesh, format: StlFormat, name: &str, path: &Path) -> Result<(), Error> {
    if mesh.is_empty() {
        return Err(Error::Stl { path: path.into(), source: StlError::Empty });
    }
    let file = File::create(path).map_err(|source| Error::Io { path: path.into(), source })?;
    stl::write(mesh, format, name, BufWriter::new(file)).map_err(|source| {
        let _ = std::fs::remove_file(path);
        Error::Stl { path: path.into(), source }
    })
}

/// Full run: compose, mesh, export, report.
pub fn generate(
    spec: &LatticeSpec,
    threads: usize,
    out: &Path,
    report_path: Option<&Path>,
) -> Result<RunReport, Error> {
    let mut built = build(spec, threads)?;
    let t = Instant::now();
    let name = out.file_stem().and_then(|s| s.to_str()).unwrap_or("lattice");
    export(&built.mesh, spec.format, name, out)?;
    built.timings.export = t.elapsed();
    let report = run_report(spec, &built, threads, Some(out));
    if let Some(p) = report_path {
        let file = File::create(p).map_err(|source| Error::Io { path: p.into(), source })?;
        report::write_report(&report, BufWriter::new(file)).map_err(|source| Error::Io { path: p.into(), source })?;
    }
    Ok(report)
}
