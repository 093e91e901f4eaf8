//! Shooting-and-bouncing-rays tracer with a geometrical-optics reflection law.

mod bvh;
mod material;
mod paths;
mod trace;

pub use bvh::{Bvh, Hit};
pub use material::{
    angle_between, diffuse_direction, diffuse_direction_with, diffuse_from_sample, mix_direction, specular_direction,
    uniform_sphere, MaterialParams,
};
pub use paths::{PathSet, PropagationPath, TraceMeta, LENGTH_TOL};
pub use trace::{trace_paths, TraceConfig};
