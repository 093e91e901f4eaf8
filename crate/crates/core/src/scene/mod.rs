//! Scene geometry: triangle meshes, rigid poses and antenna arrays.

mod array;
mod mesh;
mod pose;

pub use array::{build_planar_array, AntennaArray, ArrayLayout, GridSpec};
pub use mesh::{Aabb, MeshFormat, TriangleMesh, MIN_TRIANGLE_AREA};
pub use pose::{apply_pose, RigidPose};

use crate::raytracer::MaterialParams;
use crate::{Error, Result};

/// Posed mesh, antenna array and surface material; the tracer's input.
#[derive(Clone, Debug)]
pub struct Scene {
    mesh: TriangleMesh,
    array: AntennaArray,
    material: MaterialParams,
}

impl Scene {
    /// Fails if any antenna element lies inside the mesh bounding box.
    pub fn new(mesh: TriangleMesh, array: AntennaArray, material: MaterialParams) -> Result<Self> {
        let bbox = mesh.bounding_box();
        if let Some(p) = array.elements().find(|p| bbox.contains(p)) {
            return Err(Error::Geometry(format!(
                "antenna element at {:?} lies inside the mesh bounding box",
                p.as_slice()
            )));
        }
        Ok(Scene { mesh, array, material })
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn array(&self) -> &AntennaArray {
        &self.array
    }

    pub fn material(&self) -> MaterialParams {
        self.material
    }
}
