//! Analytic first partial derivatives of inverse dynamics with respect to
//! configuration and velocity, for the free system and for a system loaded
//! by fixed contact forces.

use dynamics::{contact_jacobian, rnea, ContactSpec};
use model::{KinematicTree, RobotState};
use nalgebra::{DMatrix, DVector, Vector6};
use spatial::{crf_bar, force_vec, SpatialForceVec, SpatialTransform, Vec3};

use crate::dof::flatten;

/// First partials of the inverse-dynamics torque. Entry (x, y) of each
/// matrix is the derivative of tau_x along velocity coordinate y; the
/// configuration derivative runs along the joint tangent retraction.
#[derive(Clone, Debug)]
pub struct FirstOrderDerivs {
    pub dtau_dq: DMatrix<f64>,
    pub dtau_dqd: DMatrix<f64>,
}

/// Derivatives of the free inverse dynamics at `state`.
pub fn id_fo(tree: &KinematicTree, state: &RobotState) -> FirstOrderDerivs {
    fo_build(tree, state, None).0
}

/// As [`id_fo`], also reporting how many (joint, ancestor) pairs the sweep
/// visited; the pair count is the algorithm's true work measure.
pub fn id_fo_with_visits(tree: &KinematicTree, state: &RobotState) -> (FirstOrderDerivs, usize) {
    fo_build(tree, state, None)
}

/// Derivatives of the constrained inverse dynamics
/// `tau_c = ID(q, qd, qdd) - Jc(q)^T lambda` holding `lambda` fixed. The
/// contact load enters as a cumulative external subtree wrench, so only the
/// configuration partials change relative to [`id_fo`].
pub fn id_fo_constrained(
    tree: &KinematicTree,
    state: &RobotState,
    contact: &ContactSpec,
    lambda: &DVector<f64>,
) -> FirstOrderDerivs {
    fo_build(tree, state, Some((contact, lambda))).0
}

pub(crate) struct ExtData {
    /// Cumulative external contact wrench over each body's subtree.
    pub fextc: Vec<SpatialForceVec>,
    /// Configuration gradient of `fextc`, one 6 x nv matrix per body.
    pub dfextc: Vec<DMatrix<f64>>,
}

fn contact_forces(spec: &ContactSpec, lambda: &DVector<f64>) -> Vec<Vec3> {
    assert_eq!(lambda.len(), spec.n_c(), "lambda length must match contact rows");
    (0..spec.points.len())
        .map(|c| Vec3::new(lambda[3 * c], lambda[3 * c + 1], lambda[3 * c + 2]))
        .collect()
}

pub(crate) fn cumulative_wrenches(
    tree: &KinematicTree,
    x0: &[SpatialTransform],
    spec: &ContactSpec,
    lambda: &DVector<f64>,
) -> Vec<SpatialForceVec> {
    let lam = contact_forces(spec, lambda);
    let mut out = vec![SpatialForceVec::zeros(); tree.n_bodies()];
    for (c, pt) in spec.points.iter().enumerate() {
        let p = x0[pt.body].transform_point(&pt.point);
        let w = force_vec(p.cross(&lam[c]), lam[c]);
        for &a in tree.ancestors(pt.body) {
            out[a] += w;
        }
    }
    out
}

pub(crate) fn cumulative_wrench_grads(
    tree: &KinematicTree,
    jc: &DMatrix<f64>,
    spec: &ContactSpec,
    lambda: &DVector<f64>,
) -> Vec<DMatrix<f64>> {
    let nv = tree.nv();
    let lam = contact_forces(spec, lambda);
    let mut out = vec![DMatrix::zeros(6, nv); tree.n_bodies()];
    for (c, pt) in spec.points.iter().enumerate() {
        // Moving the contact point moves the moment arm: the wrench gradient
        // column is [(dp/dq_d) x lambda; 0] and dp/dq_d is a Jacobian column.
        for d in 0..nv {
            let col = Vec3::new(jc[(3 * c, d)], jc[(3 * c + 1, d)], jc[(3 * c + 2, d)]);
            let top = col.cross(&lam[c]);
            for &a in tree.ancestors(pt.body) {
                let m = &mut out[a];
                m[(0, d)] += top.x;
                m[(1, d)] += top.y;
                m[(2, d)] += top.z;
            }
        }
    }
    out
}

/// Configuration gradient of the cumulative external contact wrench for
/// every body: `out[i]` column d is the derivative of the subtree wrench of
/// body i along coordinate d, at fixed `lambda`.
pub fn fext_cumulative_fo(
    tree: &KinematicTree,
    q: &DVector<f64>,
    contact: &ContactSpec,
    lambda: &DVector<f64>,
) -> Vec<DMatrix<f64>> {
    let ck = contact_jacobian(tree, q, &DVector::zeros(tree.nv()), contact);
    cumulative_wrench_grads(tree, &ck.jc, contact, lambda)
}

fn col6(m: &DMatrix<f64>, c: usize) -> Vector6<f64> {
    m.fixed_view::<6, 1>(0, c).into_owned()
}

fn fo_build(
    tree: &KinematicTree,
    state: &RobotState,
    ext: Option<(&ContactSpec, &DVector<f64>)>,
) -> (FirstOrderDerivs, usize) {
    let nv = tree.nv();
    let (_, cache) = rnea(tree, state, None);
    let dofs = flatten(tree, &cache.kin);
    let ext = ext.map(|(spec, lambda)| {
        let ck = contact_jacobian(tree, &state.q, &DVector::zeros(nv), spec);
        ExtData {
            fextc: cumulative_wrenches(tree, &cache.kin.x0, spec, lambda),
            dfextc: cumulative_wrench_grads(tree, &ck.jc, spec, lambda),
        }
    });

    let mut dtau_dq = DMatrix::zeros(nv, nv);
    let mut dtau_dqd = DMatrix::zeros(nv, nv);
    let mut visits = 0usize;

    for i in 0..tree.n_bodies() {
        let ic = &cache.ic[i];
        let bc = &cache.bc[i];
        let bct = bc.transpose();
        let cfc = crf_bar(&cache.fc[i]);
        let pr = tree.joint_dofs(i);
        // Per dof p of joint i: the row-generating covectors for the j <= i
        // block and the column-generating wrenches for the j < i block.
        let pre: Vec<[Vector6<f64>; 4]> = pr
            .clone()
            .map(|dp| {
                let s = dofs.s[dp];
                [
                    bct * s * 2.0,
                    ic * s,
                    bc * dofs.psid[dp] * 2.0 + ic * dofs.psidd[dp] + cfc * s,
                    bc * s * 2.0 + ic * (dofs.psid[dp] + dofs.phid[dp]),
                ]
            })
            .collect();
        let fxv: Option<Vec<Vector6<f64>>> = ext.as_ref().map(|e| {
            let cft = crf_bar(&e.fextc[i]).transpose();
            pr.clone().map(|dp| cft * dofs.s[dp]).collect()
        });
        for &j in tree.ancestors(i) {
            visits += 1;
            for (pl, dp) in pr.clone().enumerate() {
                let [r1, r2, wq, wqd] = &pre[pl];
                for dt in tree.joint_dofs(j) {
                    let st = &dofs.s[dt];
                    let mut dq = r1.dot(&dofs.psid[dt]) + r2.dot(&dofs.psidd[dt]);
                    if let Some(e) = &ext {
                        dq += fxv.as_ref().unwrap()[pl].dot(st)
                            - dofs.s[dp].dot(&col6(&e.dfextc[i], dt));
                    }
                    dtau_dq[(dp, dt)] = dq;
                    dtau_dqd[(dp, dt)] = r1.dot(st) + r2.dot(&(dofs.psid[dt] + dofs.phid[dt]));
                    if j != i {
                        let mut dq2 = st.dot(wq);
                        if let Some(e) = &ext {
                            dq2 -= st.dot(&col6(&e.dfextc[j], dp));
                        }
                        dtau_dq[(dt, dp)] = dq2;
                        dtau_dqd[(dt, dp)] = st.dot(wqd);
                    }
                }
            }
        }
    }
    (FirstOrderDerivs { dtau_dq, dtau_dqd }, visits)
}
