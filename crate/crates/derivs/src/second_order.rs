//! Analytic second partial derivatives of inverse dynamics and the
//! configuration gradient of the mass matrix, all built in one sweep over
//! the ancestor triples of the tree.

use dynamics::{contact_jacobian, rnea, ContactSpec};
use model::{KinematicTree, RobotState};
use nalgebra::{DMatrix, DVector, Vector6};
use spatial::{
    ang_part, coriolis_matrix, crf, crf_bar, crm, Mat6, SpatialForceVec, SpatialMotionVec,
    Tensor3, Vec3,
};

use crate::dof::flatten;
use crate::first_order::{cumulative_wrench_grads, cumulative_wrenches, id_fo};

/// Second partials of the inverse-dynamics torque, all (nv, nv, nv) with
/// axis-1-fastest storage. Slot conventions:
/// - `d2tau_dq2[x, y, z]`: derivative of dtau_x/dq_y taken along q_z
///   (axis 3 is the outer derivative, matching a finite difference of the
///   analytic first-order result stacked page by page);
/// - `d2tau_dqd2[x, y, z]`: second velocity partial of tau_x;
/// - `d2tau_cross[x, y, z]`: derivative of dtau_x/dqd_y along q_z;
/// - `dM_dq[r, c, z]`: derivative of M[r, c] along q_z.
#[allow(non_snake_case)]
#[derive(Clone, Debug)]
pub struct SecondOrderDerivs {
    pub d2tau_dq2: Tensor3,
    pub d2tau_dqd2: Tensor3,
    pub d2tau_cross: Tensor3,
    pub dM_dq: Tensor3,
}

/// Second derivatives of the free inverse dynamics at `state`.
pub fn id_so(tree: &KinematicTree, state: &RobotState) -> SecondOrderDerivs {
    so_build(tree, state, None).0
}

/// As [`id_so`], also reporting the number of ancestor triples visited.
pub fn id_so_with_visits(tree: &KinematicTree, state: &RobotState) -> (SecondOrderDerivs, usize) {
    so_build(tree, state, None)
}

/// Second derivatives of the constrained inverse dynamics
/// `tau_c = ID(q, qd, qdd) - Jc(q)^T lambda` at fixed `lambda`. Only the
/// configuration Hessian changes: the contact load is velocity and
/// acceleration independent, and the mass matrix never sees it.
pub fn id_so_constrained(
    tree: &KinematicTree,
    state: &RobotState,
    contact: &ContactSpec,
    lambda: &DVector<f64>,
) -> SecondOrderDerivs {
    so_build(tree, state, Some((contact, lambda))).0
}

/// Directional mass-matrix gradient `(dM/dq) . m` without forming the
/// tensor: with gravity removed and zero velocity, the inverse dynamics at
/// qdd = m is exactly M(q) m, so its analytic q-gradient is the contraction.
#[allow(non_snake_case)]
pub fn dMdq_times(tree: &KinematicTree, q: &DVector<f64>, m: &DVector<f64>) -> DMatrix<f64> {
    let mut free = tree.clone();
    free.gravity = Vec3::zeros();
    let state = RobotState { q: q.clone(), qd: DVector::zeros(tree.nv()), qdd: m.clone() };
    id_fo(&free, &state).dtau_dq
}

/// Second configuration derivative of `q -> M(q) m - Jc(q)^T lambda` at
/// fixed `m` and `lambda` (zero velocity, gravity removed). This is the
/// Hessian the impact-map derivatives contract against.
pub fn idsoza_c(
    tree: &KinematicTree,
    q: &DVector<f64>,
    m: &DVector<f64>,
    contact: &ContactSpec,
    lambda: &DVector<f64>,
) -> Tensor3 {
    let mut free = tree.clone();
    free.gravity = Vec3::zeros();
    let state = RobotState { q: q.clone(), qd: DVector::zeros(tree.nv()), qdd: m.clone() };
    id_so_constrained(&free, &state, contact, lambda).d2tau_dq2
}

fn col6(m: &DMatrix<f64>, c: usize) -> Vector6<f64> {
    m.fixed_view::<6, 1>(0, c).into_owned()
}

struct ExtSo {
    fextc: Vec<SpatialForceVec>,
    dfextc: Vec<DMatrix<f64>>,
    lam: Vec<Vec3>,
    bodies: Vec<usize>,
    djc: Tensor3,
}

impl ExtSo {
    /// Moment rows of the second wrench derivative
    /// d²f_ext^C[body] / dq_da dq_db (inner da, outer db); the linear rows
    /// vanish because the contact force itself is held fixed.
    fn d2f(&self, tree: &KinematicTree, body: usize, da: usize, db: usize) -> Vec3 {
        let mut m = Vec3::zeros();
        for (c, &mb) in self.bodies.iter().enumerate() {
            if tree.leq(body, mb) {
                let col = Vec3::new(
                    self.djc[(3 * c, da, db)],
                    self.djc[(3 * c + 1, da, db)],
                    self.djc[(3 * c + 2, da, db)],
                );
                m += col.cross(&self.lam[c]);
            }
        }
        m
    }
}

/// Per dof p of the deepest joint i: operator combinations shared by every
/// (j, k) ancestor pair under it.
struct PPre {
    s: SpatialMotionVec,
    /// crf_bar(2 Bc^T s)
    cb_bts: Mat6,
    /// crf_bar(Ic s)
    cb_ics: Mat6,
    /// 2 B(Ic, s)
    bb_s2: Mat6,
    /// 2 (B(Ic, psid) + crf(s) Bc - Bc crm(s))
    big2: Mat6,
    /// crf(s) Ic - Ic crm(s)
    xf_ic: Mat6,
    /// crf(s) Ic + crf_bar(Ic s)
    d_op: Mat6,
    /// 2 Bc psid + Ic psidd + crf_bar(fc) s
    w_q: SpatialForceVec,
    /// crf_bar(2 Bc s + Ic (psid + phid))
    cb_wqd: Mat6,
}

struct TPre {
    cst: Mat6,
    pp: SpatialMotionVec,
}

/// Contractions of a PPre against dof t of the middle joint j, reused for
/// every dof r of the ancestor joint k.
struct PtPre {
    a12: Vector6<f64>,
    a3: Vector6<f64>,
    hb: Vector6<f64>,
    c1: Vector6<f64>,
    c2: Vector6<f64>,
    e1: Vector6<f64>,
    f1: Vector6<f64>,
    f2: Vector6<f64>,
    g1: Vector6<f64>,
    g2: Vector6<f64>,
    g3: Vector6<f64>,
    g4: Vector6<f64>,
    hc: Vector6<f64>,
    p4row: Vector6<f64>,
}

fn so_build(
    tree: &KinematicTree,
    state: &RobotState,
    ext: Option<(&ContactSpec, &DVector<f64>)>,
) -> (SecondOrderDerivs, usize) {
    let nv = tree.nv();
    let (_, cache) = rnea(tree, state, None);
    let dofs = flatten(tree, &cache.kin);
    let cs_all: Vec<Mat6> = dofs.s.iter().map(crf).collect();
    let ang_all: Vec<Vec3> = dofs.s.iter().map(ang_part).collect();

    let ext = ext.map(|(spec, lambda)| {
        let ck = contact_jacobian(tree, &state.q, &DVector::zeros(nv), spec);
        ExtSo {
            fextc: cumulative_wrenches(tree, &cache.kin.x0, spec, lambda),
            dfextc: cumulative_wrench_grads(tree, &ck.jc, spec, lambda),
            lam: (0..spec.points.len())
                .map(|c| Vec3::new(lambda[3 * c], lambda[3 * c + 1], lambda[3 * c + 2]))
                .collect(),
            bodies: spec.points.iter().map(|p| p.body).collect(),
            djc: ck.djc_dq,
        }
    });

    let mut qq = Tensor3::zeros(nv, nv, nv);
    let mut vv = Tensor3::zeros(nv, nv, nv);
    let mut vq = Tensor3::zeros(nv, nv, nv);
    let mut mq = Tensor3::zeros(nv, nv, nv);
    let mut visits = 0usize;

    for i in 0..tree.n_bodies() {
        let ic = &cache.ic[i];
        let bc = &cache.bc[i];
        let bct = bc.transpose();
        let cfc = crf_bar(&cache.fc[i]);
        let pr = tree.joint_dofs(i);
        let pp: Vec<PPre> = pr
            .clone()
            .map(|dp| {
                let s = dofs.s[dp];
                let ics = ic * s;
                let cs = cs_all[dp];
                let cms = crm(&s);
                PPre {
                    s,
                    cb_bts: crf_bar(&(bct * s * 2.0)),
                    cb_ics: crf_bar(&ics),
                    bb_s2: coriolis_matrix(ic, &s) * 2.0,
                    big2: (coriolis_matrix(ic, &dofs.psid[dp]) + cs * bc - bc * cms) * 2.0,
                    xf_ic: cs * ic - ic * cms,
                    d_op: cs * ic + crf_bar(&ics),
                    w_q: bc * dofs.psid[dp] * 2.0 + ic * dofs.psidd[dp] + cfc * s,
                    cb_wqd: crf_bar(&(bc * s * 2.0 + ic * (dofs.psid[dp] + dofs.phid[dp]))),
                }
            })
            .collect();
        let fb = ext.as_ref().map(|e| crf_bar(&e.fextc[i]));

        for &j in tree.ancestors(i) {
            let j_lt_i = j != i;
            let td = tree.joint_dofs(j);
            let tj: Vec<TPre> = td
                .clone()
                .map(|dt| TPre { cst: cs_all[dt], pp: dofs.psid[dt] + dofs.phid[dt] })
                .collect();
            let dfi_t: Option<Vec<Vector6<f64>>> =
                ext.as_ref().map(|e| td.clone().map(|dt| col6(&e.dfextc[i], dt)).collect());
            let cbj_p: Option<Vec<Mat6>> = ext
                .as_ref()
                .map(|e| pr.clone().map(|dp| crf_bar(&col6(&e.dfextc[j], dp))).collect());
            let pt: Vec<Vec<PtPre>> = pp
                .iter()
                .enumerate()
                .map(|(pl, p)| {
                    tj.iter()
                        .enumerate()
                        .map(|(tl, t)| {
                            let dt = td.start + tl;
                            let st = dofs.s[dt];
                            let pst = dofs.psid[dt];
                            PtPre {
                                a12: p.bb_s2.transpose() * pst + p.cb_bts.transpose() * st,
                                a3: p.cb_ics.transpose() * st,
                                hb: p.big2 * pst + p.xf_ic * dofs.psidd[dt] + t.cst * p.w_q,
                                c1: p.big2.transpose() * st,
                                c2: p.xf_ic.transpose() * st,
                                e1: p.bb_s2.transpose() * st,
                                f1: p.bb_s2 * st,
                                f2: p.d_op * st,
                                g1: p.cb_ics * pst * 2.0 - p.bb_s2 * pst + p.cb_bts * st,
                                g2: p.cb_ics * st,
                                g3: p.bb_s2 * pst + p.cb_wqd * st,
                                g4: p.big2 * st + p.xf_ic * t.pp,
                                hc: p.xf_ic * st,
                                p4row: cbj_p
                                    .as_ref()
                                    .map_or(Vector6::zeros(), |cb| -(cb[pl].transpose() * st)),
                            }
                        })
                        .collect()
                })
                .collect();

            for &k in tree.ancestors(j) {
                visits += 1;
                let k_lt_j = k != j;
                let rd = tree.joint_dofs(k);
                let pp_r: Vec<SpatialMotionVec> =
                    rd.clone().map(|dr| dofs.psid[dr] + dofs.phid[dr]).collect();
                // Combined contact operator for the row-i Hessian correction:
                // commutator of crf(s_r) with crf_bar(fextc_i), minus the
                // wrench-gradient cross operator.
                let xr: Option<Vec<Mat6>> = ext.as_ref().map(|e| {
                    let fbm = fb.as_ref().unwrap();
                    rd.clone()
                        .map(|dr| {
                            cs_all[dr] * fbm - fbm * crm(&dofs.s[dr])
                                - crf_bar(&col6(&e.dfextc[i], dr))
                        })
                        .collect()
                });

                for (pl, dp) in pr.clone().enumerate() {
                    let p = &pp[pl];
                    for (tl, dt) in td.clone().enumerate() {
                        let h = &pt[pl][tl];
                        for (rl, dr) in rd.clone().enumerate() {
                            let sr = &dofs.s[dr];
                            let psr = &dofs.psid[dr];
                            let psddr = &dofs.psidd[dr];

                            // Configuration Hessian.
                            let a1 = -(h.a12.dot(psr) + h.a3.dot(psddr));
                            let corr_a = ext.as_ref().map_or(0.0, |e| {
                                let t12 = p.s.dot(&(xr.as_ref().unwrap()[rl] * dofs.s[dt]));
                                let t3 =
                                    -p.s.dot(&(cs_all[dr] * dfi_t.as_ref().unwrap()[tl]));
                                let t4 = ang_all[dp].dot(&e.d2f(tree, i, dt, dr));
                                t12 + t3 + t4
                            });
                            qq[(dp, dt, dr)] = a1 - corr_a;
                            if k_lt_j {
                                qq[(dp, dr, dt)] = a1 - corr_a;
                                let b1 = sr.dot(&h.hb);
                                let p5a = ext
                                    .as_ref()
                                    .map_or(0.0, |e| ang_all[dr].dot(&e.d2f(tree, k, dp, dt)));
                                qq[(dr, dp, dt)] = b1 - p5a;
                                if j_lt_i {
                                    let p5b = ext
                                        .as_ref()
                                        .map_or(0.0, |e| ang_all[dr].dot(&e.d2f(tree, k, dt, dp)));
                                    qq[(dr, dt, dp)] = b1 - p5b;
                                }
                            }
                            if j_lt_i {
                                let c1v = h.c1.dot(psr) + h.c2.dot(psddr);
                                let (p4a, p4b) = ext.as_ref().map_or((0.0, 0.0), |e| {
                                    let base = h.p4row.dot(sr);
                                    (
                                        base + ang_all[dt].dot(&e.d2f(tree, j, dr, dp)),
                                        base + ang_all[dt].dot(&e.d2f(tree, j, dp, dr)),
                                    )
                                });
                                qq[(dt, dr, dp)] = c1v - p4a;
                                qq[(dt, dp, dr)] = c1v - p4b;
                            }

                            // Velocity Hessian.
                            if k_lt_j {
                                let v = -h.e1.dot(sr);
                                vv[(dp, dt, dr)] = v;
                                vv[(dp, dr, dt)] = v;
                                if j_lt_i {
                                    let w = sr.dot(&h.f1);
                                    vv[(dr, dp, dt)] = w;
                                    vv[(dr, dt, dp)] = w;
                                } else if dp <= dt {
                                    // Symmetric in (dp, dt); write the mirror as a
                                    // copy so the rot23 symmetry holds bitwise.
                                    let w = sr.dot(&h.f2);
                                    vv[(dr, dp, dt)] = w;
                                    if dp != dt {
                                        vv[(dr, dt, dp)] = w;
                                    }
                                }
                            } else if dt <= dr {
                                let v = -h.c2.dot(sr);
                                vv[(dp, dt, dr)] = v;
                                if dt != dr {
                                    vv[(dp, dr, dt)] = v;
                                }
                            }
                            if j_lt_i {
                                let v = h.e1.dot(sr);
                                vv[(dt, dr, dp)] = v;
                                vv[(dt, dp, dr)] = v;
                            }

                            // Mixed velocity/configuration partials.
                            let x_a = h.e1.dot(psr);
                            vq[(dp, dt, dr)] = -x_a;
                            if j_lt_i {
                                vq[(dt, dp, dr)] = x_a;
                                vq[(dt, dr, dp)] = h.c1.dot(sr) + h.c2.dot(&pp_r[rl]);
                            }
                            if k_lt_j {
                                vq[(dp, dr, dt)] = sr.dot(&h.g1) + pp_r[rl].dot(&h.g2);
                                vq[(dr, dp, dt)] = sr.dot(&h.g3);
                                if j_lt_i {
                                    vq[(dr, dt, dp)] = sr.dot(&h.g4);
                                }
                            }

                            // Mass-matrix gradient. Slots with all three
                            // indices on one descent line keep their literal
                            // zeros: rotating a rigid subtree about its own
                            // supporting joints cannot change M there.
                            if k_lt_j {
                                let v = h.g2.dot(sr);
                                mq[(dr, dp, dt)] = v;
                                mq[(dp, dr, dt)] = v;
                            }
                            if j_lt_i {
                                let v = sr.dot(&h.hc);
                                mq[(dr, dt, dp)] = v;
                                if k_lt_j {
                                    mq[(dt, dr, dp)] = v;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (
        SecondOrderDerivs { d2tau_dq2: qq, d2tau_dqd2: vv, d2tau_cross: vq, dM_dq: mq },
        visits,
    )
}
