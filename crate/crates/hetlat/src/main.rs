use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hetlat::bench::{self, BenchConfig, BenchError};
use hetlat::spec::{emit_spec, LatticeSpec};
use hetlat::stl::StlFormat;
use hetlat::{compose_spec, exit, generate, read_spec, report, Error, Overrides};
use hetlat_core::field::CellTopology;
use hetlat_core::{FieldMode, ParamKey};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hetlat", version, about = "Generate heterogeneous lattice structures as STL meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compose, mesh and export a lattice
    Generate(GenerateArgs),
    /// Check a spec and every per-cell parameter without meshing
    Validate(ValidateArgs),
    /// Print the normalized spec and unit-cell statistics
    Info(SpecArg),
    /// Time generation across 1, 8, 27 and 64 cells
    Bench(BenchArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Lattice spec (JSON)
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Output STL; defaults to the spec path with an .stl extension
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<StlFormat>,
    /// Samples per unit-cell edge
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value_t = default_threads(), value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    #[arg(long)]
    mode: Option<FieldMode>,
    /// JSON report; defaults to the output path with a .report.json suffix
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    mode: Option<FieldMode>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Spec whose unit cell is benchmarked; cubic and gyroid by default
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    resolution: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    /// Cells per axis, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SIZES)]
    sizes: Vec<usize>,
    /// Runs per size; the fastest is reported
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Permit more than 64 cells
    #[arg(long)]
    allow_large: bool,
    /// CSV destination; stdout by default
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_threads() -> u16 {
    std::thread::available_parallelism().map_or(1, |n| n.get().min(u16::MAX as usize) as u16)
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Error> {
    match path {
        None => report::write_report(value, io::stdout().lock()).map_err(|source| Error::Io { path: "-".into(), source }),
        Some(p) => {
            let f = File::create(p).map_err(|source| Error::Io { path: p.into(), source })?;
            report::write_report(value, BufWriter::new(f)).map_err(|source| Error::Io { path: p.into(), source })
        }
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<(), Error> {
    let spec = Overrides { resolution: a.resolution, format: a.format, mode: a.mode }.apply(read_spec(&a.spec.spec)?)?;
    let out = a.out.unwrap_or_else(|| a.spec.spec.with_extension("stl"));
    let report_path = a.report.unwrap_or_else(|| {
        let mut s = out.clone().into_os_string();
        s.push(".report.json");
        s.into()
    });
    let r = generate(&spec, a.threads as usize, &out, Some(&report_path))?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let genus = r.mesh.genus.map_or("n/a".to_string(), |g| g.to_string());
    println!(
        "{}: {} triangles, genus {genus}, watertight {}, volume {:.6}, {:.3} s",
        out.display(),
        r.mesh.triangles,
        r.mesh.watertight,
        r.mesh.volume,
        r.timings.total
    );
    Ok(())
}

#[derive(Serialize)]
struct Range {
    key: &'static str,
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct Validation {
    ok: bool,
    topology: String,
    kind: String,
    cells: [usize; 3],
    mode: String,
    parameters: Vec<Range>,
    warnings: Vec<String>,
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Error> {
    let spec = Overrides { mode: a.mode, ..Default::default() }.apply(read_spec(&a.spec.spec)?)?;
    let field = compose_spec(&spec)?;
    let mut parameters = Vec::new();
    for key in ParamKey::ALL {
        let values: Vec<f64> = field
            .cells()
            .cells()
            .filter_map(|c| field.cell_parameters(c).and_then(|p| p.get(key)))
            .collect();
        if spec.params.get(key).is_some() && !values.is_empty() {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            parameters.push(Range { key: key.id(), min, max });
        }
    }
    let v = Validation {
        ok: true,
        topology: spec.topology.id().into(),
        kind: spec.topology.kind().into(),
        cells: spec.counts,
        mode: spec.mode.id().into(),
        parameters,
        warnings: field.warnings().iter().map(|w| w.to_string()).collect(),
    };
    for w in &v.warnings {
        eprintln!("warning: {w}");
    }
    write_json(&v, a.report.as_deref())
}

fn cmd_info(a: SpecArg) -> Result<(), Error> {
    let spec: LatticeSpec = read_spec(&a.spec)?;
    let mut out = io::stdout().lock();
    let io_err = |source| Error::Io { path: "-".into(), source };
    writeln!(out, "{}", emit_spec(&spec)).map_err(io_err)?;
    let [nx, ny, nz] = spec.counts;
    writeln!(out, "cells: {} ({nx} x {ny} x {nz}), cell size {}", nx * ny * nz, spec.u).map_err(io_err)?;
    match spec.topology {
        CellTopology::Beam(b) => {
            let field = compose_spec(&spec)?;
            let trunc = field.cell_parameters([1, 1, 1]).and_then(|p| p.trunc);
            if let Ok(g) = b.graph(spec.u, trunc) {
                writeln!(
                    out,
                    "cell (1, 1, 1) graph: {} vertices, {} edges, cycle rank {}",
                    g.vertex_count(),
                    g.edge_count(),
                    g.cycle_rank()
                )
                .map_err(io_err)?;
            }
        }
        CellTopology::Tpms(t) => writeln!(out, "surface: {t}, one period per cell").map_err(io_err)?,
    }
    let side = |n: usize| n * spec.resolution + 3;
    writeln!(
        out,
        "sample grid at resolution {}: about {} points",
        spec.resolution,
        side(nx) as u64 * side(ny) as u64 * side(nz) as u64
    )
    .map_err(io_err)?;
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), BenchError> {
    let specs = match &a.spec {
        Some(p) => vec![read_spec(p)?],
        None => bench::default_specs(a.resolution),
    };
    let config = BenchConfig {
        specs,
        sizes: a.sizes,
        resolution: Some(a.resolution),
        threads: a.threads as usize,
        repeats: a.repeats,
        allow_large: a.allow_large,
    };
    let rows = bench::run(&config)?;
    let io_err = |path: &Path, e: csv::Error| {
        BenchError::Run(Error::Io { path: path.into(), source: io::Error::other(e.to_string()) })
    };
    match &a.out {
        None => bench::write_csv(&rows, io::stdout().lock()).map_err(|e| io_err(Path::new("-"), e)),
        Some(p) => {
            let f = File::create(p).map_err(|source| BenchError::Run(Error::Io { path: p.clone(), source }))?;
            bench::write_csv(&rows, f).map_err(|e| io_err(p, e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Info(a) => cmd_info(a),
        Command::Bench(a) => match cmd_bench(a) {
            Ok(()) => Ok(()),
            Err(BenchError::Run(e)) => Err(e),
            Err(e @ BenchError::TooLarge { .. }) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit::USAGE);
            }
        },
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
