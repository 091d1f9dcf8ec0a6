//! One forward sweep producing every per-body kinematic quantity the
//! derivative equations consume, all expressed in the ground frame.

use model::{joint_kinematics, KinematicTree, RobotState};
use spatial::{
    cross_motion, motion_vec, MotionMatrix, SpatialMotionVec, SpatialTransform, Vec3,
};

/// Per-body kinematics in the ground frame. `s[i]` holds the world-aligned
/// motion subspace columns of joint i; `phid`, `psid`, `psidd` are the
/// matrices Φ̇_i = v_i × S_i, Ψ̇_i = v_{λ(i)} × S_i and
/// Ψ̈_i = a_{λ(i)} × S_i + v_{λ(i)} × Ψ̇_i. The base "acceleration" `a0`
/// equals −gravity so that gravitational wrenches fall out of I·a.
#[derive(Clone, Debug)]
pub struct KinematicsCache {
    pub x0: Vec<SpatialTransform>,
    pub s: Vec<MotionMatrix>,
    pub v: Vec<SpatialMotionVec>,
    pub a: Vec<SpatialMotionVec>,
    pub phid: Vec<MotionMatrix>,
    pub psid: Vec<MotionMatrix>,
    pub psidd: Vec<MotionMatrix>,
    pub a0: SpatialMotionVec,
}

impl KinematicsCache {
    /// Velocity of the parent body (zero for joints on the fixed base).
    pub fn parent_v(&self, tree: &KinematicTree, i: usize) -> SpatialMotionVec {
        match tree.parent(i) {
            Some(p) => self.v[p],
            None => SpatialMotionVec::zeros(),
        }
    }

    /// Acceleration of the parent body (`a0` for joints on the fixed base).
    pub fn parent_a(&self, tree: &KinematicTree, i: usize) -> SpatialMotionVec {
        match tree.parent(i) {
            Some(p) => self.a[p],
            None => self.a0,
        }
    }

    /// Joint velocity S_i q̇_i.
    pub fn joint_v(&self, tree: &KinematicTree, i: usize, qd: &nalgebra::DVector<f64>) -> SpatialMotionVec {
        let mut out = SpatialMotionVec::zeros();
        for (t, d) in tree.joint_dofs(i).enumerate() {
            out += self.s[i].column(t) * qd[d];
        }
        out
    }
}

pub fn forward_pass(tree: &KinematicTree, state: &RobotState) -> KinematicsCache {
    forward_pass_with_gravity(tree, state, &tree.gravity)
}

/// Forward sweep with an explicit gravity vector (the contact machinery
/// needs gravity-free bias accelerations on the same model).
pub fn forward_pass_with_gravity(
    tree: &KinematicTree,
    state: &RobotState,
    gravity: &Vec3,
) -> KinematicsCache {
    for x in state.q.iter().chain(state.qd.iter()).chain(state.qdd.iter()) {
        assert!(x.is_finite(), "forward_pass: non-finite state input");
    }
    let n = tree.n_bodies();
    let a0 = motion_vec(Vec3::zeros(), -gravity);

    let mut x0: Vec<SpatialTransform> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut phid = Vec::with_capacity(n);
    let mut psid = Vec::with_capacity(n);
    let mut psidd = Vec::with_capacity(n);

    for i in 0..n {
        let (xj, s_local) = joint_kinematics(tree.joint(i), tree.joint_q(&state.q, i));
        // body→world: parent's X0 after the in-parent pose of the body.
        let x_body_in_parent = tree.placement(i).inverse().compose(&xj);
        let x0_i = match tree.parent(i) {
            Some(p) => x0[p].compose(&x_body_in_parent),
            None => x_body_in_parent,
        };
        let nd = s_local.ncols();
        let mut s_i = MotionMatrix::zeros(nd);
        for t in 0..nd {
            s_i.set_column(t, &x0_i.apply_motion(&s_local.column(t).into_owned()));
        }

        let (v_p, a_p) = match tree.parent(i) {
            Some(p) => (v[p], a[p]),
            None => (SpatialMotionVec::zeros(), a0),
        };
        let mut vj = SpatialMotionVec::zeros();
        let mut sqdd = SpatialMotionVec::zeros();
        for (t, d) in tree.joint_dofs(i).enumerate() {
            vj += s_i.column(t) * state.qd[d];
            sqdd += s_i.column(t) * state.qdd[d];
        }
        let v_i = v_p + vj;
        let a_i = a_p + sqdd + cross_motion(&v_i, &vj);

        let mut phid_i = MotionMatrix::zeros(nd);
        let mut psid_i = MotionMatrix::zeros(nd);
        let mut psidd_i = MotionMatrix::zeros(nd);
        for t in 0..nd {
            let col = s_i.column(t).into_owned();
            phid_i.set_column(t, &cross_motion(&v_i, &col));
            let psid_col = cross_motion(&v_p, &col);
            psid_i.set_column(t, &psid_col);
            psidd_i.set_column(t, &(cross_motion(&a_p, &col) + cross_motion(&v_p, &psid_col)));
        }

        x0.push(x0_i);
        s.push(s_i);
        v.push(v_i);
        a.push(a_i);
        phid.push(phid_i);
        psid.push(psid_i);
        psidd.push(psidd_i);
    }

    KinematicsCache { x0, s, v, a, phid, psid, psidd, a0 }
}
