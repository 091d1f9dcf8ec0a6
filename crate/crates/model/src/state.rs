//! Joint-space state and the tangent-space retraction used by every
//! finite-difference probe.

use nalgebra::{DVector, Unit, UnitQuaternion};
use spatial::Vec3;

use crate::joint::{unit_quat, JointModel};
use crate::tree::{KinematicTree, ModelError};

/// Configuration, velocity, and acceleration. `q` has tree.nq() entries
/// (quaternion coordinates for spherical/free joints); `qd` and `qdd` have
/// tree.nv() entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RobotState {
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
    pub qdd: DVector<f64>,
}

impl RobotState {
    pub fn new(
        tree: &KinematicTree,
        q: DVector<f64>,
        qd: DVector<f64>,
        qdd: DVector<f64>,
    ) -> Result<Self, ModelError> {
        for (what, v, expected) in
            [("q", &q, tree.nq()), ("qd", &qd, tree.nv()), ("qdd", &qdd, tree.nv())]
        {
            if v.len() != expected {
                return Err(ModelError::StateLength {
                    what: what.into(),
                    expected,
                    got: v.len(),
                });
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(ModelError::StateNonFinite { what: what.into() });
            }
        }
        Ok(RobotState { q, qd, qdd })
    }

    /// Rest state: zero coordinates with identity quaternions.
    pub fn zeros(tree: &KinematicTree) -> Self {
        RobotState {
            q: zero_q(tree),
            qd: DVector::zeros(tree.nv()),
            qdd: DVector::zeros(tree.nv()),
        }
    }
}

/// The neutral configuration (identity quaternions, zeros elsewhere).
pub fn zero_q(tree: &KinematicTree) -> DVector<f64> {
    let mut q = DVector::zeros(tree.nq());
    for i in 0..tree.n_bodies() {
        let o = tree.q_offset(i);
        match tree.joint(i) {
            JointModel::Spherical => q[o + 3] = 1.0,
            JointModel::Free => q[o + 3] = 1.0,
            _ => {}
        }
    }
    q
}

fn quat_retract(coords: &mut [f64], axis: usize, h: f64) {
    let q0 = unit_quat(coords);
    let mut e = Vec3::zeros();
    e[axis] = 1.0;
    // Right (body-frame) increment, matching the motion subspace columns.
    let q1 = q0 * UnitQuaternion::from_axis_angle(&Unit::new_unchecked(e), h);
    coords[0] = q1.coords[0];
    coords[1] = q1.coords[1];
    coords[2] = q1.coords[2];
    coords[3] = q1.coords[3];
}

/// Flows the whole configuration along a velocity for time h: per joint the
/// retraction q ⊕ (h·q̇_joint), with quaternion joints taking one body-frame
/// exponential step. Used by trajectory-style finite differences.
pub fn advance_q(
    tree: &KinematicTree,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    let mut out = q.clone();
    for i in 0..tree.n_bodies() {
        let o = tree.q_offset(i);
        let d = tree.dof_offset(i);
        match tree.joint(i) {
            JointModel::Revolute { .. } | JointModel::Prismatic { .. } => out[o] += h * qd[d],
            JointModel::Spherical => {
                let w = h * Vec3::new(qd[d], qd[d + 1], qd[d + 2]);
                quat_step(&mut out.as_mut_slice()[o..o + 4], &w);
            }
            JointModel::Free => {
                let w = h * Vec3::new(qd[d], qd[d + 1], qd[d + 2]);
                let r = unit_quat(&q.as_slice()[o..o + 4]).to_rotation_matrix();
                quat_step(&mut out.as_mut_slice()[o..o + 4], &w);
                let vlin = Vec3::new(qd[d + 3], qd[d + 4], qd[d + 5]);
                let step = r * (h * vlin);
                for k in 0..3 {
                    out[o + 4 + k] += step[k];
                }
            }
        }
    }
    out
}

fn quat_step(coords: &mut [f64], w: &Vec3) {
    let q0 = unit_quat(coords);
    let q1 = q0 * UnitQuaternion::from_scaled_axis(*w);
    coords[0] = q1.coords[0];
    coords[1] = q1.coords[1];
    coords[2] = q1.coords[2];
    coords[3] = q1.coords[3];
}

/// Retraction q ⊕ (h·e_dof) along the tangent direction of one velocity
/// coordinate: plain addition for 1-DoF joints, a body-frame quaternion
/// increment for rotational DoF, and a body-frame translation for the
/// linear DoF of a free joint.
pub fn perturb_q(tree: &KinematicTree, q: &DVector<f64>, dof: usize, h: f64) -> DVector<f64> {
    let (i, t) = tree.dof_joint(dof);
    let o = tree.q_offset(i);
    let mut out = q.clone();
    match tree.joint(i) {
        JointModel::Revolute { .. } | JointModel::Prismatic { .. } => out[o] += h,
        JointModel::Spherical => quat_retract(&mut out.as_mut_slice()[o..o + 4], t, h),
        JointModel::Free => {
            if t < 3 {
                quat_retract(&mut out.as_mut_slice()[o..o + 4], t, h);
            } else {
                // Linear velocity coordinates are body-frame: step the anchor
                // position along the rotated axis.
                let r = unit_quat(&q.as_slice()[o..o + 4]).to_rotation_matrix();
                let mut e = Vec3::zeros();
                e[t - 3] = 1.0;
                let step = r * (h * e);
                for k in 0..3 {
                    out[o + 4 + k] += step[k];
                }
            }
        }
    }
    out
}
