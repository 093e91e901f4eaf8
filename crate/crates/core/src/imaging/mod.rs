//! Matched-filter volume reconstruction and depth-axis maximum projection.

mod matched;
mod pair;
mod project;

pub use matched::matched_filter;
pub use pair::{Image, Provenance, RadarImagePair};
pub use project::{max_project, normalize_pair};

use serde::{Deserialize, Serialize};

use crate::scene::Aabb;
use crate::{Error, Result, Vec3};

/// Regular voxel lattice; `z` is the depth (boresight) axis.
///
/// `origin` is the center of voxel `(0, 0, 0)`; voxel `(i, j, k)` is centered
/// at `origin + (i·dx, j·dy, k·dz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRecord", into = "GridRecord")]
pub struct VoxelGrid {
    origin: Vec3,
    spacing: Vec3,
    counts: [usize; 3],
}

#[derive(Serialize, Deserialize)]
struct GridRecord {
    origin: [f64; 3],
    spacing: [f64; 3],
    counts: [usize; 3],
}

impl TryFrom<GridRecord> for VoxelGrid {
    type Error = Error;
    fn try_from(r: GridRecord) -> Result<Self> {
        VoxelGrid::new(Vec3::from(r.origin), Vec3::from(r.spacing), r.counts)
    }
}

impl From<VoxelGrid> for GridRecord {
    fn from(g: VoxelGrid) -> Self {
        GridRecord {
            origin: g.origin.into(),
            spacing: g.spacing.into(),
            counts: g.counts,
        }
    }
}

impl VoxelGrid {
    pub fn new(origin: Vec3, spacing: Vec3, counts: [usize; 3]) -> Result<Self> {
        if !spacing.iter().all(|&s| s > 0.0 && s.is_finite()) {
            return Err(Error::Config(format!(
                "voxel spacing must be positive, got {:?}",
                spacing.as_slice()
            )));
        }
        if counts.contains(&0) {
            return Err(Error::Config(format!(
                "voxel counts must be at least 1, got {counts:?}"
            )));
        }
        if !origin.iter().all(|c| c.is_finite()) {
            return Err(Error::Config("non-finite grid origin".into()));
        }
        Ok(VoxelGrid {
            origin,
            spacing,
            counts,
        })
    }

    /// Grid whose voxel centers are symmetric about `center`.
    pub fn centered(center: Vec3, spacing: Vec3, counts: [usize; 3]) -> Result<Self> {
        let half = Vec3::from_fn(|a, _| 0.5 * (counts[a].max(1) - 1) as f64 * spacing[a]);
        VoxelGrid::new(center - half, spacing, counts)
    }

    /// Default imaging grid: 128×128×64 voxels at 5 mm, centered on `bounds`.
    pub fn default_for(bounds: &Aabb) -> Self {
        VoxelGrid::centered(bounds.center(), Vec3::repeat(0.005), [128, 128, 64]).expect("default grid is valid")
    }

    pub fn origin(&self) -> &Vec3 {
        &self.origin
    }

    pub fn spacing(&self) -> &Vec3 {
        &self.spacing
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center_of(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64, j as f64, k as f64).component_mul(&self.spacing)
    }

    /// Flat index; `k` varies fastest.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.counts[1] + j) * self.counts[2] + k
    }

    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let k = flat % self.counts[2];
        let ij = flat / self.counts[2];
        [ij / self.counts[1], ij % self.counts[1], k]
    }

    /// Nearest voxel to `p`, or `None` outside the grid.
    pub fn voxel_of(&self, p: &Vec3) -> Option<[usize; 3]> {
        let mut out = [0usize; 3];
        for a in 0..3 {
            let f = ((p[a] - self.origin[a]) / self.spacing[a]).round();
            if f < 0.0 || f >= self.counts[a] as f64 {
                return None;
            }
            out[a] = f as usize;
        }
        Some(out)
    }

    pub fn depth_of(&self, k: usize) -> f64 {
        self.origin.z + k as f64 * self.spacing.z
    }

    pub fn z_min(&self) -> f64 {
        self.origin.z
    }

    pub fn z_max(&self) -> f64 {
        self.depth_of(self.counts[2] - 1)
    }
}

/// Non-negative magnitudes on a [`VoxelGrid`], `k` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelVolume {
    grid: VoxelGrid,
    values: Vec<f64>,
}

impl VoxelVolume {
    pub fn new(grid: VoxelGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} values for {} voxels",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Geometry("voxel values must be finite and non-negative".into()));
        }
        Ok(VoxelVolume { grid, values })
    }

    pub fn grid(&self) -> &VoxelGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, j, k)]
    }

    /// Voxel with the largest value (first in flat order on ties).
    pub fn argmax(&self) -> [usize; 3] {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        self.grid.unflatten(best)
    }

    /// Depth profile through column `(i, j)`.
    pub fn column(&self, i: usize, j: usize) -> &[f64] {
        let start = self.grid.index(i, j, 0);
        &self.values[start..start + self.grid.counts[2]]
    }
}
