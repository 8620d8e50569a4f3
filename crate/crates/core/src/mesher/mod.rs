//! Surface extraction: sampling, marching cubes, welding and diagnostics.

mod cells;
mod grid;
mod march;
mod mesh;
mod table;

pub use cells::{BeamCell, TpmsCell, GRADIENT_FLOOR};
pub use grid::{GridError, SampleGrid, MAX_POINTS};
pub use march::{
    check_seam, polygonize, polygonize_slab, sample_slab, weld, MeshError, SampleSlab,
    SurfacePatch, EDGE_CLAMP,
};
pub use mesh::{ComponentReport, MeshReport, TriangleMesh};
pub use table::{CaseTable, Contour};

use crate::field::LatticeField;
use crate::topology::ImplicitSolid;

/// Smallest accepted samples-per-cell for lattices.
pub const MIN_LATTICE_RESOLUTION: usize = 8;

/// Voxel layers per slab used by [`assemble_lattice`].
pub const DEFAULT_SLAB_LAYERS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum AssembleError {
    Resolution { given: usize, min: usize },
    Mesh(MeshError),
}

impl core::fmt::Display for AssembleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AssembleError::Resolution { given, min } => {
                write!(f, "resolution {given} is below the minimum of {min} samples per cell")
            }
            AssembleError::Mesh(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for AssembleError {}

impl From<MeshError> for AssembleError {
    fn from(e: MeshError) -> Self {
        AssembleError::Mesh(e)
    }
}

/// Sample grid for a lattice at `resolution` samples per cell edge.
///
/// The spacing divides the cell size, so cell faces lie on sample planes.
pub fn lattice_grid(field: &LatticeField, resolution: usize) -> Result<SampleGrid, AssembleError> {
    if resolution < MIN_LATTICE_RESOLUTION {
        return Err(AssembleError::Resolution { given: resolution, min: MIN_LATTICE_RESOLUTION });
    }
    let bounds = field.bounds().ok_or(MeshError::Unbounded)?;
    let h = field.cells().cell_size() / resolution as f64;
    Ok(SampleGrid::covering(bounds, h, 1).map_err(MeshError::from)?)
}

/// Single-threaded mesh of a composed lattice.
pub fn assemble_lattice(field: &LatticeField, resolution: usize) -> Result<TriangleMesh, AssembleError> {
    let grid = lattice_grid(field, resolution)?;
    Ok(polygonize(field as &dyn ImplicitSolid, &grid, DEFAULT_SLAB_LAYERS)?)
}
