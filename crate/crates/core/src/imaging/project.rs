use super::{Image, RadarImagePair, VoxelVolume};

/// Collapses the depth axis: intensity is the column maximum, depth the z
/// coordinate of the maximizing voxel (smallest `k` on ties).
pub fn max_project(volume: &VoxelVolume) -> RadarImagePair {
    let grid = volume.grid();
    let [nx, ny, _] = grid.counts();
    let mut intensity = Image::zeros(nx, ny);
    let mut depth = Image::zeros(nx, ny);
    for i in 0..nx {
        for j in 0..ny {
            let column = volume.column(i, j);
            let mut best = 0;
            for (k, v) in column.iter().enumerate() {
                if *v > column[best] {
                    best = k;
                }
            }
            intensity.set(i, j, column[best]);
            depth.set(i, j, grid.depth_of(best));
        }
    }
    RadarImagePair::new(intensity, depth, *grid)
}

/// Scales intensity to `[0, 1]` by its maximum and maps depth affinely from
/// `[z_min, z_max]` onto `[0, 1]`. All-zero intensity and single-slice grids
/// map to zeros.
pub fn normalize_pair(pair: &RadarImagePair) -> RadarImagePair {
    let mut out = pair.clone();
    let max = pair.intensity.max();
    if max > 0.0 {
        out.intensity.map_in_place(|v| v / max);
    }
    let (lo, hi) = (pair.grid.z_min(), pair.grid.z_max());
    if hi > lo {
        out.depth.map_in_place(|d| ((d - lo) / (hi - lo)).clamp(0.0, 1.0));
    } else {
        out.depth.map_in_place(|_| 0.0);
    }
    out.normalized = true;
    out
}
