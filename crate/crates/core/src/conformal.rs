//! Cylindrical placement of beam cells.
//!
//! Cell `(i, j, k)` occupies the radial band `[rho0 + (i-1)u, rho0 + iu]`,
//! the angular sector `[2pi (j-1)/Ny, 2pi j/Ny]` and the axial slab
//! `[(k-1)u, ku]`. Graph vertices are mapped and beams stay straight chords.

use core::f64::consts::PI;
use core::fmt;

use crate::field::CellGrid;
use crate::math::{atan2, cos, floor, sin, sqrt, Vec3};
use crate::topology::SkeletalGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylindricalMap {
    inner_radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConformalError {
    InnerRadius(f64),
    TooFewSectors(usize),
    CellOutOfRange([usize; 3]),
}

impl fmt::Display for ConformalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalError::InnerRadius(r) => write!(f, "inner radius must be positive, got {r}"),
            ConformalError::TooFewSectors(n) => {
                write!(f, "a cylindrical lattice needs at least 3 angular cells, got {n}")
            }
            ConformalError::CellOutOfRange([i, j, k]) => write!(f, "cell ({i}, {j}, {k}) is out of range"),
        }
    }
}

impl core::error::Error for ConformalError {}

impl CylindricalMap {
    pub fn new(inner_radius: f64) -> Result<Self, ConformalError> {
        if inner_radius > 0.0 && inner_radius.is_finite() {
            Ok(CylindricalMap { inner_radius })
        } else {
            Err(ConformalError::InnerRadius(inner_radius))
        }
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self, grid: &CellGrid) -> f64 {
        self.inner_radius + grid.counts()[0] as f64 * grid.cell_size()
    }

    /// Angular sector count must be at least three.
    pub fn check(&self, grid: &CellGrid) -> Result<(), ConformalError> {
        let ny = grid.counts()[1];
        if ny < 3 {
            return Err(ConformalError::TooFewSectors(ny));
        }
        Ok(())
    }

    /// World point of fractional lattice coordinates (in cell units, 0-based).
    pub fn to_world(&self, xi: [f64; 3], grid: &CellGrid) -> Vec3 {
        let u = grid.cell_size();
        let rho = self.inner_radius + xi[0] * u;
        let phi = 2.0 * PI * xi[1] / grid.counts()[1] as f64;
        Vec3::new(rho * cos(phi), rho * sin(phi), xi[2] * u)
    }

    /// Inverse of [`to_world`](Self::to_world) with the angle in `[0, Ny)`.
    pub fn lattice_coords(&self, p: Vec3, grid: &CellGrid) -> [f64; 3] {
        let u = grid.cell_size();
        let ny = grid.counts()[1] as f64;
        let rho = sqrt(p.x * p.x + p.y * p.y);
        let mut t = atan2(p.y, p.x) / (2.0 * PI);
        t -= floor(t);
        let mut a = t * ny;
        if a >= ny {
            a -= ny;
        }
        [(rho - self.inner_radius) / u, a, p.z / u]
    }

    /// Graph of one cell (vertices in `[0,u]^3`) placed on the cylinder.
    ///
    /// The angular index is periodic, so `j = Ny + 1` repeats `j = 1`.
    pub fn map_graph(
        &self,
        graph: &SkeletalGraph,
        cell: [usize; 3],
        grid: &CellGrid,
    ) -> Result<SkeletalGraph, ConformalError> {
        let [nx, _, nz] = grid.counts();
        let [i, j, k] = cell;
        if i == 0 || i > nx || j == 0 || k == 0 || k > nz {
            return Err(ConformalError::CellOutOfRange(cell));
        }
        let u = grid.cell_size();
        Ok(graph.map_vertices(|v| {
            self.to_world(
                [(i - 1) as f64 + v.x / u, (j - 1) as f64 + v.y / u, (k - 1) as f64 + v.z / u],
                grid,
            )
        }))
    }
}

/// Normalized radial position (0 inner ring, 1 outer ring) and angular
/// position in `[0, 1)` of a cell.
pub fn conformal_bindings(cell: [usize; 3], grid: &CellGrid) -> Result<(f64, f64), ConformalError> {
    let [nx, ny, _] = grid.counts();
    let [i, j, _] = cell;
    if i == 0 || i > nx || j == 0 || j > ny {
        return Err(ConformalError::CellOutOfRange(cell));
    }
    let rho = (i - 1) as f64 / (nx.max(2) - 1) as f64;
    Ok((rho, (j - 1) as f64 / ny as f64))
}
