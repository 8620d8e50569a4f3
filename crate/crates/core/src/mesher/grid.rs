use alloc::vec::Vec;
use core::fmt;

use crate::math::{floor, Aabb, Vec3};

/// Hard limit on sample points per job.
pub const MAX_POINTS: u64 = 1 << 34;

/// Regular sample lattice whose points sit on integer multiples of `spacing`.
///
/// Grids built with the same spacing share lattice planes, so cell faces at
/// multiples of the cell size land exactly on samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleGrid {
    spacing: f64,
    offset: [i64; 3],
    dims: [usize; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridError {
    Spacing(f64),
    EmptyBounds,
    TooLarge { points: u64 },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::Spacing(h) => write!(f, "sample spacing must be positive, got {h}"),
            GridError::EmptyBounds => f.write_str("nothing to sample: bounds are empty"),
            GridError::TooLarge { points } => {
                write!(f, "{points} sample points exceed the limit of {MAX_POINTS}")
            }
        }
    }
}

impl core::error::Error for GridError {}

impl SampleGrid {
    /// Smallest aligned grid containing `bounds`, grown by `pad` samples per side.
    pub fn covering(bounds: Aabb, spacing: f64, pad: usize) -> Result<Self, GridError> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GridError::Spacing(spacing));
        }
        if bounds.is_empty() || !bounds.min.is_finite() || !bounds.max.is_finite() {
            return Err(GridError::EmptyBounds);
        }
        let mut offset = [0i64; 3];
        let mut dims = [0usize; 3];
        for a in 0..3 {
            let lo = floor(bounds.min[a] / spacing) as i64 - pad as i64;
            let hi = -(floor(-bounds.max[a] / spacing) as i64) + pad as i64;
            offset[a] = lo;
            dims[a] = (hi - lo + 1).max(2) as usize;
        }
        let points = dims.iter().map(|&d| d as u64).product::<u64>();
        if points > MAX_POINTS {
            return Err(GridError::TooLarge { points });
        }
        Ok(SampleGrid { spacing, offset, dims })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Sample points per axis.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn point_count(&self) -> u64 {
        self.dims.iter().map(|&d| d as u64).product()
    }

    pub fn voxel_count(&self) -> u64 {
        self.dims.iter().map(|&d| d as u64 - 1).product()
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let h = self.spacing;
        Vec3::new(
            (self.offset[0] + i as i64) as f64 * h,
            (self.offset[1] + j as i64) as f64 * h,
            (self.offset[2] + k as i64) as f64 * h,
        )
    }

    /// Linear point index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> u64 {
        (k as u64 * self.dims[1] as u64 + j as u64) * self.dims[0] as u64 + i as u64
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(
            self.point(0, 0, 0),
            self.point(self.dims[0] - 1, self.dims[1] - 1, self.dims[2] - 1),
        )
    }

    /// Voxel-layer ranges `[z0, z1)` of at most `layers` layers each.
    ///
    /// With `align = Some(n)` every lattice plane whose global index is a
    /// multiple of `n` also starts a new slab.
    pub fn slabs(&self, layers: usize, align: Option<usize>) -> Vec<(usize, usize)> {
        let layers = layers.max(1);
        let total = self.dims[2] - 1;
        let mut out = Vec::new();
        let mut z0 = 0;
        while z0 < total {
            let mut z1 = (z0 + layers).min(total);
            if let Some(n) = align.filter(|&n| n > 0) {
                for z in z0 + 1..z1 {
                    if (self.offset[2] + z as i64).rem_euclid(n as i64) == 0 {
                        z1 = z;
                        break;
                    }
                }
            }
            out.push((z0, z1));
            z0 = z1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_and_padded() {
        let b = Aabb::new(Vec3::new(0.1, 0.0, -0.1), Vec3::new(0.9, 1.0, 1.05));
        let g = SampleGrid::covering(b, 0.25, 1).unwrap();
        assert_eq!(g.point(0, 0, 0), Vec3::new(-0.25, -0.25, -0.5));
        assert_eq!(g.dims(), [7, 7, 9]);
        let top = g.point(6, 6, 8);
        assert!(top.x >= 0.9 && top.y >= 1.0 && top.z >= 1.05);
        assert!(g.bounds().contains(b.min) && g.bounds().contains(b.max));
    }

    #[test]
    fn slabs_partition_layers() {
        let b = Aabb::new(Vec3::ZERO, Vec3::splat(4.0));
        let g = SampleGrid::covering(b, 0.5, 0).unwrap();
        let s = g.slabs(3, None);
        assert_eq!(s, alloc::vec![(0, 3), (3, 6), (6, 8)]);
        let s = g.slabs(5, Some(4));
        assert_eq!(s, alloc::vec![(0, 4), (4, 8)]);
    }

    #[test]
    fn rejects_bad_input() {
        let b = Aabb::new(Vec3::ZERO, Vec3::splat(1.0));
        assert!(SampleGrid::covering(b, 0.0, 0).is_err());
        assert!(SampleGrid::covering(Aabb::empty(), 0.1, 0).is_err());
        assert!(matches!(
            SampleGrid::covering(b, 1e-5, 0),
            Err(GridError::TooLarge { .. })
        ));
    }
}
