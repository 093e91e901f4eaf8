//! Radar simulation and microwave imaging toolkit.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`scene`]: triangle meshes, rigid poses and antenna arrays.
//! 2. [`raytracer`]: shooting-and-bouncing rays with a blended
//!    diffuse/specular reflection law, producing a [`PathSet`].
//! 3. [`signal`]: stepped-frequency (SFCW) IF synthesis into an [`IfDataCube`].
//! 4. [`imaging`]: matched-filter reconstruction and maximum projection into a
//!    [`RadarImagePair`].
//!
//! [`dataset`] strings the stages together into labeled dataset generation and
//! holds the image augmentation used for training.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod imaging;
pub(crate) mod io;
pub mod raytracer;
pub mod rng;
pub mod scene;
pub mod signal;

pub use error::{Error, Result};
pub use imaging::{RadarImagePair, VoxelGrid, VoxelVolume};
pub use raytracer::{MaterialParams, PathSet, PropagationPath, TraceConfig};
pub use scene::{AntennaArray, RigidPose, Scene, TriangleMesh};
pub use signal::{IfDataCube, SfcwConfig};

/// 3-vector used for positions and directions (meters where dimensional).
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 matrix used for rotations.
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Propagation speed in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
