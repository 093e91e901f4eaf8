use serde::{Deserialize, Serialize};

use crate::{Error, Mat3, Result, TriangleMesh, Vec3};

const ORTHONORMAL_TOL: f64 = 1e-9;

/// Proper rigid motion `v ↦ R·v + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoseRecord", into = "PoseRecord")]
pub struct RigidPose {
    rotation: Mat3,
    translation: Vec3,
}

/// Serialized form: row-major rotation, translation in meters.
#[derive(Serialize, Deserialize)]
struct PoseRecord {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

impl TryFrom<PoseRecord> for RigidPose {
    type Error = Error;

    fn try_from(r: PoseRecord) -> Result<Self> {
        let rotation = Mat3::from_fn(|i, j| r.rotation[i][j]);
        RigidPose::new(rotation, Vec3::from(r.translation))
    }
}

impl From<RigidPose> for PoseRecord {
    fn from(p: RigidPose) -> Self {
        PoseRecord {
            rotation: std::array::from_fn(|i| std::array::from_fn(|j| p.rotation[(i, j)])),
            translation: p.translation.into(),
        }
    }
}

impl Default for RigidPose {
    fn default() -> Self {
        RigidPose::identity()
    }
}

impl RigidPose {
    /// Rejects rotations with `RᵀR ≠ I` or `det R ≠ +1` beyond 1e-9.
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self> {
        let gram_err = (rotation.transpose() * rotation - Mat3::identity()).abs().max();
        let det = rotation.determinant();
        if !(gram_err <= ORTHONORMAL_TOL) || !((det - 1.0).abs() <= ORTHONORMAL_TOL) {
            return Err(Error::Geometry(format!(
                "rotation is not proper orthonormal (|RᵀR - I| = {gram_err:e}, det = {det})"
            )));
        }
        if !translation.iter().all(|c| c.is_finite()) {
            return Err(Error::Geometry("non-finite translation".into()));
        }
        Ok(RigidPose { rotation, translation })
    }

    pub fn identity() -> Self {
        RigidPose {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn translation_only(translation: Vec3) -> Self {
        RigidPose {
            rotation: Mat3::identity(),
            translation,
        }
    }

    /// Rotation by `angle` radians about `axis`, no translation.
    pub fn about_axis(axis: Vec3, angle: f64) -> Self {
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        RigidPose {
            rotation: *rot.matrix(),
            translation: Vec3::zeros(),
        }
    }

    /// Viewing-angle rotation: azimuth about +y, then elevation about +x, then
    /// roll about the +z boresight. Angles in degrees.
    pub fn from_view_angles_deg(azimuth: f64, elevation: f64, roll: f64, translation: Vec3) -> Self {
        let az = RigidPose::about_axis(Vec3::y(), azimuth.to_radians());
        let el = RigidPose::about_axis(Vec3::x(), elevation.to_radians());
        let rl = RigidPose::about_axis(Vec3::z(), roll.to_radians());
        let mut pose = rl.then_after(&el).then_after(&az);
        pose.translation = translation;
        pose
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn apply_point(&self, v: &Vec3) -> Vec3 {
        self.rotation * v + self.translation
    }

    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    /// `self ∘ first`: applies `first`, then `self`.
    pub fn then_after(&self, first: &RigidPose) -> RigidPose {
        RigidPose {
            rotation: self.rotation * first.rotation,
            translation: self.rotation * first.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidPose {
        let rt = self.rotation.transpose();
        RigidPose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }
}

/// Maps every vertex through `pose` and re-derives normals.
pub fn apply_pose(mesh: &TriangleMesh, pose: &RigidPose) -> Result<TriangleMesh> {
    mesh.transformed(pose)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use proptest::prelude::*;

    use super::*;

    fn tetra() -> TriangleMesh {
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.03, 0.0, 0.01),
            Vec3::new(0.0, 0.05, -0.02),
            Vec3::new(0.01, 0.01, 0.04),
        ];
        TriangleMesh::new(v, vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]).unwrap()
    }

    fn max_vertex_err(a: &TriangleMesh, b: &TriangleMesh) -> f64 {
        a.vertices()
            .iter()
            .zip(b.vertices())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_is_vertex_identical() {
        let m = tetra();
        assert_eq!(apply_pose(&m, &RigidPose::identity()).unwrap().vertices(), m.vertices());
    }

    #[test]
    fn quarter_turn_about_z() {
        let pose = RigidPose::about_axis(Vec3::z(), FRAC_PI_2);
        let p = pose.apply_point(&Vec3::x());
        assert!((p - Vec3::y()).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let scaled = Mat3::identity() * 1.001;
        assert!(RigidPose::new(scaled, Vec3::zeros()).is_err());
        let reflection = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(RigidPose::new(reflection, Vec3::zeros()).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let pose = RigidPose::from_view_angles_deg(12.0, -7.0, 3.0, Vec3::new(0.0, 0.0, 0.3));
        let json = serde_json::to_string(&pose).unwrap();
        let back: RigidPose = serde_json::from_str(&json).unwrap();
        assert_eq!(back, pose);
    }

    fn arb_pose() -> impl Strategy<Value = RigidPose> {
        (
            -180.0..180.0f64,
            -90.0..90.0f64,
            -180.0..180.0f64,
            prop::array::uniform3(-1.0..1.0f64),
        )
            .prop_map(|(a, e, r, t)| RigidPose::from_view_angles_deg(a, e, r, Vec3::from(t)))
    }

    proptest! {
        #[test]
        fn pose_then_inverse_restores(pose in arb_pose()) {
            let m = tetra();
            let back = apply_pose(&apply_pose(&m, &pose).unwrap(), &pose.inverse()).unwrap();
            prop_assert!(max_vertex_err(&m, &back) < 1e-9);
        }

        #[test]
        fn composition_is_associative(a in arb_pose(), b in arb_pose(), c in arb_pose()) {
            let m = tetra();
            let left = apply_pose(&m, &a.then_after(&b).then_after(&c)).unwrap();
            let right = apply_pose(&m, &a.then_after(&b.then_after(&c))).unwrap();
            let stepwise = apply_pose(&apply_pose(&apply_pose(&m, &c).unwrap(), &b).unwrap(), &a).unwrap();
            prop_assert!(max_vertex_err(&left, &right) < 1e-9);
            prop_assert!(max_vertex_err(&left, &stepwise) < 1e-9);
        }

        #[test]
        fn rigid_motion_preserves_distances_and_rotates_normals(pose in arb_pose()) {
            let m = tetra();
            let posed = apply_pose(&m, &pose).unwrap();
            prop_assert_eq!(posed.len(), m.len());
            for i in 0..m.vertices().len() {
                for j in 0..m.vertices().len() {
                    let d0 = (m.vertices()[i] - m.vertices()[j]).norm();
                    let d1 = (posed.vertices()[i] - posed.vertices()[j]).norm();
                    prop_assert!((d0 - d1).abs() < 1e-9);
                }
            }
            for (n0, n1) in m.normals().iter().zip(posed.normals()) {
                prop_assert!((pose.apply_vector(n0) - n1).norm() < 1e-9);
                prop_assert!((n1.norm() - 1.0).abs() < 1e-9);
            }
        }
    }
}
