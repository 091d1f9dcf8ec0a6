//! Recursive Newton-Euler inverse dynamics with composite subtree
//! accumulations, and the composite-rigid-body mass matrix.

use model::{KinematicTree, RobotState};
use nalgebra::{DMatrix, DVector};
use spatial::{
    body_wrench, coriolis_matrix, xform_inertia, Mat6, SpatialForceVec, SpatialInertia, Vec3,
};

use crate::kinematics::{forward_pass, forward_pass_with_gravity, KinematicsCache};

/// Everything the derivative equations consume, in the ground frame:
/// per-body inertia I, Coriolis matrix B, net wrench f = I·a + v×*I·v,
/// external wrench fext (world frame, acting on the body), and the
/// composite subtree sums ic/bc/fc/fextc of each.
#[derive(Clone, Debug)]
pub struct DynamicsCache {
    pub kin: KinematicsCache,
    pub inertia: Vec<SpatialInertia>,
    pub ic: Vec<SpatialInertia>,
    pub b: Vec<Mat6>,
    pub bc: Vec<Mat6>,
    pub f: Vec<SpatialForceVec>,
    pub fc: Vec<SpatialForceVec>,
    pub fext: Vec<SpatialForceVec>,
    pub fextc: Vec<SpatialForceVec>,
    pub tau: DVector<f64>,
}

/// Leaf→root accumulation of per-body quantities into subtree sums:
/// out[i] = Σ_{k ⪰ i} items[k]. One backward sweep.
pub fn subtree_sums<T>(tree: &KinematicTree, items: &[T]) -> Vec<T>
where
    T: Clone + std::ops::AddAssign<T>,
{
    assert_eq!(items.len(), tree.n_bodies());
    let mut out = items.to_vec();
    for i in (0..tree.n_bodies()).rev() {
        if let Some(p) = tree.parent(i) {
            let x = out[i].clone();
            out[p] += x;
        }
    }
    out
}

/// Inverse dynamics: the joint torques balancing the state's accelerations
/// under gravity and the optional per-body external wrenches, plus the full
/// cache of intermediate quantities.
pub fn rnea(
    tree: &KinematicTree,
    state: &RobotState,
    fext: Option<&[SpatialForceVec]>,
) -> (DVector<f64>, DynamicsCache) {
    let n = tree.n_bodies();
    let kin = forward_pass(tree, state);

    let mut inertia = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for i in 0..n {
        let iw = xform_inertia(&kin.x0[i], tree.inertia(i));
        f.push(body_wrench(&iw, &kin.v[i], &kin.a[i]));
        b.push(coriolis_matrix(&iw, &kin.v[i]));
        inertia.push(iw);
    }
    let fext_vec: Vec<SpatialForceVec> = match fext {
        Some(list) => {
            assert_eq!(list.len(), n, "rnea: fext must have one entry per body");
            list.to_vec()
        }
        None => vec![SpatialForceVec::zeros(); n],
    };

    let ic = subtree_sums(tree, &inertia);
    let bc = subtree_sums(tree, &b);
    let fc = subtree_sums(tree, &f);
    let fextc = subtree_sums(tree, &fext_vec);

    let mut tau = DVector::zeros(tree.nv());
    for i in 0..n {
        let net = fc[i] - fextc[i];
        for (t, d) in tree.joint_dofs(i).enumerate() {
            tau[d] = kin.s[i].column(t).dot(&net);
        }
    }
    assert!(
        tau.iter().all(|x| x.is_finite()),
        "rnea: non-finite torque (bad model or state propagated)"
    );

    let cache =
        DynamicsCache { kin, inertia, ic, b, bc, f, fc, fext: fext_vec, fextc, tau: tau.clone() };
    (tau, cache)
}

/// Composite-rigid-body mass matrix, assembled directly from the ancestor
/// pair rule M_ji = S_jᵀ I_i^C S_i on the lower triangle and mirrored.
pub fn crba(tree: &KinematicTree, q: &DVector<f64>) -> DMatrix<f64> {
    let n = tree.n_bodies();
    let state = RobotState {
        q: q.clone(),
        qd: DVector::zeros(tree.nv()),
        qdd: DVector::zeros(tree.nv()),
    };
    let kin = forward_pass_with_gravity(tree, &state, &Vec3::zeros());
    let inertia: Vec<SpatialInertia> =
        (0..n).map(|i| xform_inertia(&kin.x0[i], tree.inertia(i))).collect();
    let ic = subtree_sums(tree, &inertia);

    let mut m = DMatrix::zeros(tree.nv(), tree.nv());
    for i in 0..n {
        for &j in tree.ancestors(i) {
            let block = kin.s[j].transpose() * ic[i] * &kin.s[i];
            for (t, dj) in tree.joint_dofs(j).enumerate() {
                for (r, di) in tree.joint_dofs(i).enumerate() {
                    m[(dj, di)] = block[(t, r)];
                    m[(di, dj)] = block[(t, r)];
                }
            }
        }
    }
    m
}
