//! Joint models: degrees of freedom, coordinate layout, joint transform and
//! motion subspace.

use nalgebra::{Quaternion, Rotation3, Unit, UnitQuaternion};
use spatial::{MotionMatrix, SpatialTransform, Vec3};

/// A joint connecting a body to its parent. 1-DoF joints carry a unit axis;
/// multi-DoF joints use a unit quaternion (coordinates ordered x, y, z, w)
/// in the configuration vector.
#[derive(Clone, Debug, PartialEq)]
pub enum JointModel {
    Revolute { axis: Vec3 },
    Prismatic { axis: Vec3 },
    Spherical,
    Free,
}

impl JointModel {
    /// Velocity degrees of freedom.
    pub fn nv(&self) -> usize {
        match self {
            JointModel::Revolute { .. } | JointModel::Prismatic { .. } => 1,
            JointModel::Spherical => 3,
            JointModel::Free => 6,
        }
    }

    /// Configuration coordinates (quaternions make nq > nv).
    pub fn nq(&self) -> usize {
        match self {
            JointModel::Revolute { .. } | JointModel::Prismatic { .. } => 1,
            JointModel::Spherical => 4,
            JointModel::Free => 7,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            JointModel::Revolute { .. } => "revolute",
            JointModel::Prismatic { .. } => "prismatic",
            JointModel::Spherical => "spherical",
            JointModel::Free => "free",
        }
    }
}

pub(crate) fn unit_quat(coords: &[f64]) -> UnitQuaternion<f64> {
    // Stored as [x, y, z, w].
    UnitQuaternion::from_quaternion(Quaternion::new(coords[3], coords[0], coords[1], coords[2]))
}

/// Joint transform (body frame → joint anchor frame) and motion subspace
/// columns expressed in the post-rotation body frame.
pub fn joint_kinematics(joint: &JointModel, qj: &[f64]) -> (SpatialTransform, MotionMatrix) {
    assert_eq!(qj.len(), joint.nq(), "joint coordinate count mismatch");
    match joint {
        JointModel::Revolute { axis } => {
            let r = Rotation3::from_axis_angle(&Unit::new_normalize(*axis), qj[0]);
            let x = SpatialTransform::new(*r.matrix(), Vec3::zeros());
            let mut s = MotionMatrix::zeros(1);
            s.fixed_view_mut::<3, 1>(0, 0).copy_from(axis);
            (x, s)
        }
        JointModel::Prismatic { axis } => {
            // Translation t = q·axis: the body origin sits at t in anchor
            // coordinates, so pos = −t with identity rotation.
            let x = SpatialTransform::new(spatial::Mat3::identity(), -axis * qj[0]);
            let mut s = MotionMatrix::zeros(1);
            s.fixed_view_mut::<3, 1>(3, 0).copy_from(axis);
            (x, s)
        }
        JointModel::Spherical => {
            let r = unit_quat(qj).to_rotation_matrix();
            let x = SpatialTransform::new(*r.matrix(), Vec3::zeros());
            let mut s = MotionMatrix::zeros(3);
            s.fixed_view_mut::<3, 3>(0, 0).copy_from(&spatial::Mat3::identity());
            (x, s)
        }
        JointModel::Free => {
            let r = unit_quat(&qj[0..4]).to_rotation_matrix();
            let t = Vec3::new(qj[4], qj[5], qj[6]);
            // pos = −Rᵀt places the body origin at t in anchor coordinates.
            let x = SpatialTransform::new(*r.matrix(), -r.matrix().transpose() * t);
            let mut s = MotionMatrix::zeros(6);
            s.fill_with_identity();
            (x, s)
        }
    }
}
