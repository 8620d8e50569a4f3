//! Parallel slab meshing on a bounded rayon pool.
//!
//! Slabs are sampled and polygonized concurrently in batches; the weld runs
//! once over all patches in slab order, so the output does not depend on
//! the thread count.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use hetlat_core::mesher::{
    check_seam, lattice_grid, polygonize_slab, sample_slab, weld, AssembleError, CaseTable, MeshError,
    SampleGrid, SampleSlab, SurfacePatch,
};
use hetlat_core::{ImplicitSolid, LatticeField, TriangleMesh};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub field_eval: Duration,
    pub polygonize: Duration,
    pub weld: Duration,
    pub export: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.field_eval + self.polygonize + self.weld + self.export
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    Assemble(#[from] AssembleError),
    #[error("{0}")]
    Mesh(#[from] MeshError),
    #[error("cannot start {threads} worker threads: {message}")]
    Pool { threads: usize, message: String },
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| PipelineError::Pool { threads, message: e.to_string() })
}

/// Mesh `solid` on `grid`; slab cuts fall on every `align`-th lattice plane.
pub fn mesh_solid<S: ImplicitSolid + Sync + ?Sized>(
    solid: &S,
    grid: &SampleGrid,
    layers: usize,
    align: Option<usize>,
    threads: usize,
) -> Result<(TriangleMesh, Timings), PipelineError> {
    let pool = pool(threads)?;
    static TABLE: OnceLock<CaseTable> = OnceLock::new();
    let table = TABLE.get_or_init(CaseTable::new);
    let slabs = grid.slabs(layers, align);
    let batch = (threads.max(1) * 2).max(4);
    let mut timings = Timings::default();
    let mut patches: Vec<SurfacePatch> = Vec::with_capacity(slabs.len());
    let mut prev: Option<SampleSlab> = None;

    pool.install(|| -> Result<(), PipelineError> {
        for group in slabs.chunks(batch) {
            let t = Instant::now();
            let sampled: Vec<SampleSlab> =
                group.par_iter().map(|&(z0, z1)| sample_slab(solid, grid, z0, z1)).collect();
            timings.field_eval += t.elapsed();

            let t = Instant::now();
            if let Some(p) = &prev {
                check_seam(p, &sampled[0])?;
            }
            for w in sampled.windows(2) {
                check_seam(&w[0], &w[1])?;
            }
            let mut part: Vec<SurfacePatch> =
                sampled.par_iter().map(|s| polygonize_slab(table, grid, s)).collect();
            patches.append(&mut part);
            prev = sampled.into_iter().last();
            timings.polygonize += t.elapsed();
        }
        Ok(())
    })?;

    let t = Instant::now();
    let mesh = weld(&patches)?;
    timings.weld = t.elapsed();
    Ok((mesh, timings))
}

/// Slab thickness in voxel layers for a cell resolution.
pub fn slab_layers(resolution: usize) -> usize {
    (resolution / 4).clamp(2, 32)
}

/// Mesh a composed lattice at `resolution` samples per cell edge.
pub fn mesh_lattice(
    field: &LatticeField,
    resolution: usize,
    threads: usize,
) -> Result<(TriangleMesh, Timings), PipelineError> {
    let grid = lattice_grid(field, resolution)?;
    let align = field.config().cylindrical.is_none().then_some(resolution);
    mesh_solid(field, &grid, slab_layers(resolution), align, threads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hetlat_core::mesher::polygonize;
    use hetlat_core::Torus;

    #[test]
    fn matches_the_sequential_mesher() {
        let t = Torus::new(1.0, 0.3).unwrap();
        let grid = SampleGrid::covering(t.bounds().unwrap(), 0.05, 1).unwrap();
        let seq = polygonize(&t, &grid, 5).unwrap();
        for threads in [1, 3, 8] {
            let (par, _) = mesh_solid(&t, &grid, 3, None, threads).unwrap();
            assert_eq!(par, seq);
        }
    }
}
