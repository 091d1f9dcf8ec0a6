//! Finite-difference validation of the directional-derivative laws the
//! analytic derivative algorithms rely on: derivatives of motion subspaces,
//! velocities, accelerations, inertias, Coriolis matrices and subtree
//! wrenches along the tangent-space retraction. Every check perturbs random
//! mixed-joint trees and reports its worst scaled residual; the validation
//! command and the test suites run the same list.

use model::{perturb_q, random_model, random_state, KinematicTree, RobotState};
use nalgebra::DVector;
use spatial::suite::{rand_vec6, rng, CheckResult};
use spatial::{
    coriolis_matrix, crf, crf_bar, crm, cross_motion, SpatialForceVec, SpatialMotionVec,
};

use crate::kinematics::KinematicsCache;
use crate::rnea::{rnea, DynamicsCache};

/// Central-difference step for the directional derivatives.
pub const FD_STEP: f64 = 4e-6;
/// Relative tolerance of every check in the suite.
pub const FD_TOL: f64 = 1e-6;
/// Entries smaller than this are compared absolutely (scaled by the floor),
/// so FD roundoff on near-zero entries is not read as relative error.
const SCALE_FLOOR: f64 = 0.1;

fn rr(worst: &mut f64, fd: f64, an: f64) {
    let r = (fd - an).abs() / fd.abs().max(an.abs()).max(SCALE_FLOOR);
    if r > *worst {
        *worst = r;
    }
}

fn rr_iter<'a>(
    worst: &mut f64,
    fd: impl Iterator<Item = &'a f64>,
    an: impl Iterator<Item = &'a f64>,
) {
    for (a, b) in fd.zip(an) {
        rr(worst, *a, *b);
    }
}

struct Inst {
    tree: KinematicTree,
    state: RobotState,
    c0: DynamicsCache,
    /// Per velocity coordinate d: caches at q ⊕ (±h e_d).
    dq: Vec<(DynamicsCache, DynamicsCache)>,
    /// Per velocity coordinate d: caches at q̇ ± h e_d.
    dqd: Vec<(DynamicsCache, DynamicsCache)>,
    f_const: SpatialForceVec,
    a_const: SpatialMotionVec,
}

fn build_instances(n_trees: usize, seed: u64) -> Vec<Inst> {
    let mut out = Vec::with_capacity(n_trees);
    for k in 0..n_trees {
        let n = 3 + k % 10;
        let branching = if k % 3 == 0 { 0.0 } else { 0.35 };
        let tree = random_model(n, seed.wrapping_add(k as u64), branching);
        let state = random_state(&tree, seed.wrapping_add(1000 + k as u64));
        let c0 = rnea(&tree, &state, None).1;
        let mut dq = Vec::with_capacity(tree.nv());
        let mut dqd = Vec::with_capacity(tree.nv());
        for d in 0..tree.nv() {
            let at_q = |h: f64| {
                let q = perturb_q(&tree, &state.q, d, h);
                let st = RobotState { q, qd: state.qd.clone(), qdd: state.qdd.clone() };
                rnea(&tree, &st, None).1
            };
            dq.push((at_q(FD_STEP), at_q(-FD_STEP)));
            let at_qd = |h: f64| {
                let mut qd = state.qd.clone();
                qd[d] += h;
                let st = RobotState { q: state.q.clone(), qd, qdd: state.qdd.clone() };
                rnea(&tree, &st, None).1
            };
            dqd.push((at_qd(FD_STEP), at_qd(-FD_STEP)));
        }
        let mut r = rng(seed.wrapping_add(7777 + k as u64));
        let f_const = rand_vec6(&mut r);
        let a_const = rand_vec6(&mut r);
        out.push(Inst { tree, state, c0, dq, dqd, f_const, a_const });
    }
    out
}

/// γ_i = Σ_{l⪯i} S_l q̈_l per body, from a given kinematics cache.
fn gamma_vec(
    tree: &KinematicTree,
    kin: &KinematicsCache,
    qdd: &DVector<f64>,
) -> Vec<SpatialMotionVec> {
    let mut out: Vec<SpatialMotionVec> = Vec::with_capacity(tree.n_bodies());
    for i in 0..tree.n_bodies() {
        let mut g = match tree.parent(i) {
            Some(p) => out[p],
            None => SpatialMotionVec::zeros(),
        };
        for (t, d) in tree.joint_dofs(i).enumerate() {
            g += kin.s[i].column(t) * qdd[d];
        }
        out.push(g);
    }
    out
}

/// ξ_i = a_i − γ_i − a₀ per body.
fn xi_vec(
    tree: &KinematicTree,
    kin: &KinematicsCache,
    qdd: &DVector<f64>,
) -> Vec<SpatialMotionVec> {
    gamma_vec(tree, kin, qdd)
        .iter()
        .enumerate()
        .map(|(i, g)| kin.a[i] - g - kin.a0)
        .collect()
}

enum Rel {
    /// joint j at or above body i (j ⪯ i, same joint included)
    Anc,
    /// joint j strictly inside body i's subtree (j ≻ i)
    Desc,
    Disjoint,
}

fn rel(tree: &KinematicTree, j: usize, i: usize) -> Rel {
    if tree.leq(j, i) {
        Rel::Anc
    } else if tree.leq(i, j) {
        Rel::Desc
    } else {
        Rel::Disjoint
    }
}

/// Runs one check body over every (body i, velocity coordinate d) pair of
/// every instance and returns the worst residual. The body receives the
/// instance, i, the flat coordinate d and its (joint, in-joint index).
fn sweep(insts: &[Inst], mut body: impl FnMut(&Inst, usize, usize, usize, usize) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    for inst in insts {
        for i in 0..inst.tree.n_bodies() {
            for d in 0..inst.tree.nv() {
                let (j, r) = inst.tree.dof_joint(d);
                worst = worst.max(body(inst, i, d, j, r));
            }
        }
    }
    worst
}

/// The directional-derivative identity suite: finite differences of the
/// forward-pass and subtree quantities against their closed forms, on
/// `n_trees` random mixed-joint trees.
pub fn jk_suite(n_trees: usize, seed: u64) -> Vec<CheckResult> {
    let insts = build_instances(n_trees, seed);
    let h2 = 2.0 * FD_STEP;

    type Check<'a> = (&'a str, Box<dyn Fn(&[Inst]) -> f64>);
    let checks: Vec<Check> = vec![
        ("j1_subspace_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, _r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (&cp.kin.s[i] - &cm_.kin.s[i]) / h2;
                let s_j = inst.c0.kin.s[j].column(inst.tree.dof_joint(d).1).into_owned();
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&s_j) * &inst.c0.kin.s[i]
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j2_force_cross_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (spatial::cross_force(&cp.kin.v[i], &inst.f_const)
                    - spatial::cross_force(&cm_.kin.v[i], &inst.f_const))
                    / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    let dv = crm(&(inst.c0.kin.parent_v(&inst.tree, j) - inst.c0.kin.v[i]))
                        * inst.c0.kin.s[j].column(r);
                    crf_bar(&inst.f_const) * dv
                } else {
                    SpatialForceVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j3_subspace_pairing_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.kin.s[i].transpose() * inst.f_const
                    - cm_.kin.s[i].transpose() * inst.f_const)
                    / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    -(inst.c0.kin.s[i].transpose()
                        * (crf_bar(&inst.f_const) * inst.c0.kin.s[j].column(r)))
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j4_inertia_times_const_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.inertia[i] * inst.a_const - cm_.inertia[i] * inst.a_const) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    let s_j = inst.c0.kin.s[j].column(r).into_owned();
                    crf_bar(&(inst.c0.inertia[i] * inst.a_const)) * s_j
                        + inst.c0.inertia[i] * cross_motion(&inst.a_const, &s_j)
                } else {
                    SpatialForceVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j5_momentum_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.inertia[i] * cp.kin.v[i] - cm_.inertia[i] * cm_.kin.v[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crf_bar(&(inst.c0.inertia[i] * inst.c0.kin.v[i]))
                        * inst.c0.kin.s[j].column(r)
                        + inst.c0.inertia[i] * inst.c0.kin.psid[j].column(r)
                } else {
                    SpatialForceVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j6_accel_residual_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let xp = xi_vec(&inst.tree, &cp.kin, &inst.state.qdd);
                let xm = xi_vec(&inst.tree, &cm_.kin, &inst.state.qdd);
                let fd = (xp[i] - xm[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    let x0 = xi_vec(&inst.tree, &inst.c0.kin, &inst.state.qdd);
                    let xi_pj = match inst.tree.parent(j) {
                        Some(p) => x0[p],
                        None => SpatialMotionVec::zeros(),
                    };
                    crm(&(inst.c0.kin.parent_v(&inst.tree, j) - inst.c0.kin.v[i]))
                        * inst.c0.kin.psid[j].column(r)
                        + crm(&(xi_pj - x0[i])) * inst.c0.kin.s[j].column(r)
                } else {
                    SpatialMotionVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j7_accel_sum_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let gp = gamma_vec(&inst.tree, &cp.kin, &inst.state.qdd);
                let gm = gamma_vec(&inst.tree, &cm_.kin, &inst.state.qdd);
                let fd = (gp[i] - gm[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    let g0 = gamma_vec(&inst.tree, &inst.c0.kin, &inst.state.qdd);
                    let g_pj = match inst.tree.parent(j) {
                        Some(p) => g0[p],
                        None => SpatialMotionVec::zeros(),
                    };
                    crm(&(g_pj - g0[i])) * inst.c0.kin.s[j].column(r)
                } else {
                    SpatialMotionVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j8_velocity_qd", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dqd[d];
                let fd = (cp.kin.v[i] - cm_.kin.v[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    inst.c0.kin.s[j].column(r).into_owned()
                } else {
                    SpatialMotionVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j9_accel_residual_qd", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dqd[d];
                let xp = xi_vec(&inst.tree, &cp.kin, &inst.state.qdd);
                let xm = xi_vec(&inst.tree, &cm_.kin, &inst.state.qdd);
                let fd = (xp[i] - xm[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    inst.c0.kin.psid[j].column(r)
                        + inst.c0.kin.phid[j].column(r)
                        - crm(&inst.c0.kin.v[i]) * inst.c0.kin.s[j].column(r)
                } else {
                    SpatialMotionVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("j10_velocity_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.kin.v[i] - cm_.kin.v[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&(inst.c0.kin.parent_v(&inst.tree, j) - inst.c0.kin.v[i]))
                        * inst.c0.kin.s[j].column(r)
                } else {
                    SpatialMotionVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k1_subspace_cols_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (&cp.kin.s[i] - &cm_.kin.s[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&inst.c0.kin.s[j].column(r).into_owned()) * &inst.c0.kin.s[i]
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k2_phid_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (&cp.kin.phid[i] - &cm_.kin.phid[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&inst.c0.kin.psid[j].column(r).into_owned()) * &inst.c0.kin.s[i]
                        + crm(&inst.c0.kin.s[j].column(r).into_owned()) * &inst.c0.kin.phid[i]
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k3_joint_vel_cross_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let wj = |c: &DynamicsCache| {
                    crm(&c.kin.joint_v(&inst.tree, i, &inst.state.qd)) * &c.kin.s[i]
                };
                let fd = (wj(cp) - wj(cm_)) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&inst.c0.kin.s[j].column(r).into_owned()) * wj(&inst.c0)
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k4_psid_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (&cp.kin.psid[i] - &cm_.kin.psid[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&inst.c0.kin.psid[j].column(r).into_owned()) * &inst.c0.kin.s[i]
                        + crm(&inst.c0.kin.s[j].column(r).into_owned()) * &inst.c0.kin.psid[i]
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k5_inertia_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.inertia[i] - cm_.inertia[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    let s_j = inst.c0.kin.s[j].column(r).into_owned();
                    crf(&s_j) * inst.c0.inertia[i] - inst.c0.inertia[i] * crm(&s_j)
                } else {
                    fd * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k6_inertia_comp_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.ic[i] - cm_.ic[i]) / h2;
                let s_j = inst.c0.kin.s[j].column(r).into_owned();
                let an = match rel(&inst.tree, j, i) {
                    Rel::Anc => crf(&s_j) * inst.c0.ic[i] - inst.c0.ic[i] * crm(&s_j),
                    Rel::Desc => crf(&s_j) * inst.c0.ic[j] - inst.c0.ic[j] * crm(&s_j),
                    Rel::Disjoint => fd * 0.0,
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k7_accel_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.kin.a[i] - cm_.kin.a[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    inst.c0.kin.psidd[j].column(r)
                        - crm(&inst.c0.kin.v[i]) * inst.c0.kin.psid[j].column(r)
                        - crm(&inst.c0.kin.a[i]) * inst.c0.kin.s[j].column(r)
                } else {
                    SpatialMotionVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k8_inertia_accel_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.inertia[i] * cp.kin.a[i] - cm_.inertia[i] * cm_.kin.a[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crf_bar(&(inst.c0.inertia[i] * inst.c0.kin.a[i]))
                        * inst.c0.kin.s[j].column(r)
                        + inst.c0.inertia[i] * inst.c0.kin.psidd[j].column(r)
                        - inst.c0.inertia[i]
                            * (crm(&inst.c0.kin.v[i]) * inst.c0.kin.psid[j].column(r))
                } else {
                    SpatialForceVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k9_psidd_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (&cp.kin.psidd[i] - &cm_.kin.psidd[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&inst.c0.kin.psidd[j].column(r).into_owned()) * &inst.c0.kin.s[i]
                        + crm(&inst.c0.kin.psid[j].column(r).into_owned())
                            * &inst.c0.kin.psid[i]
                            * 2.0
                        + crm(&inst.c0.kin.s[j].column(r).into_owned()) * &inst.c0.kin.psidd[i]
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k10_coriolis_comp_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.bc[i] - cm_.bc[i]) / h2;
                let s_j = inst.c0.kin.s[j].column(r).into_owned();
                let psid_j = inst.c0.kin.psid[j].column(r).into_owned();
                let an = match rel(&inst.tree, j, i) {
                    Rel::Anc => {
                        coriolis_matrix(&inst.c0.ic[i], &psid_j) + crf(&s_j) * inst.c0.bc[i]
                            - inst.c0.bc[i] * crm(&s_j)
                    }
                    Rel::Desc => {
                        coriolis_matrix(&inst.c0.ic[j], &psid_j) + crf(&s_j) * inst.c0.bc[j]
                            - inst.c0.bc[j] * crm(&s_j)
                    }
                    Rel::Disjoint => fd * 0.0,
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k11_wrench_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.f[i] - cm_.f[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    inst.c0.inertia[i] * inst.c0.kin.psidd[j].column(r)
                        + crf_bar(&inst.c0.f[i]) * inst.c0.kin.s[j].column(r)
                        + inst.c0.b[i] * inst.c0.kin.psid[j].column(r) * 2.0
                } else {
                    SpatialForceVec::zeros()
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k12_wrench_comp_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.fc[i] - cm_.fc[i]) / h2;
                let an = match rel(&inst.tree, j, i) {
                    Rel::Anc => {
                        inst.c0.ic[i] * inst.c0.kin.psidd[j].column(r)
                            + crf_bar(&inst.c0.fc[i]) * inst.c0.kin.s[j].column(r)
                            + inst.c0.bc[i] * inst.c0.kin.psid[j].column(r) * 2.0
                    }
                    Rel::Desc => {
                        inst.c0.ic[j] * inst.c0.kin.psidd[j].column(r)
                            + crf_bar(&inst.c0.fc[j]) * inst.c0.kin.s[j].column(r)
                            + inst.c0.bc[j] * inst.c0.kin.psid[j].column(r) * 2.0
                    }
                    Rel::Disjoint => SpatialForceVec::zeros(),
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k13_subspace_t_q", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dq[d];
                let fd = (cp.kin.s[i].transpose() - cm_.kin.s[i].transpose()) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    -(inst.c0.kin.s[i].transpose()
                        * crf(&inst.c0.kin.s[j].column(r).into_owned()))
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k14_phid_qd", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dqd[d];
                let fd = (&cp.kin.phid[i] - &cm_.kin.phid[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) {
                    crm(&inst.c0.kin.s[j].column(r).into_owned()) * &inst.c0.kin.s[i]
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k15_psid_qd", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dqd[d];
                let fd = (&cp.kin.psid[i] - &cm_.kin.psid[i]) / h2;
                let an = if matches!(rel(&inst.tree, j, i), Rel::Anc) && j != i {
                    crm(&inst.c0.kin.s[j].column(r).into_owned()) * &inst.c0.kin.s[i]
                } else {
                    fd.clone() * 0.0
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
        ("k16_coriolis_comp_qd", Box::new(move |ins| {
            sweep(ins, |inst, i, d, j, r| {
                let (cp, cm_) = &inst.dqd[d];
                let fd = (cp.bc[i] - cm_.bc[i]) / h2;
                let s_j = inst.c0.kin.s[j].column(r).into_owned();
                let an = match rel(&inst.tree, j, i) {
                    Rel::Anc => coriolis_matrix(&inst.c0.ic[i], &s_j),
                    Rel::Desc => coriolis_matrix(&inst.c0.ic[j], &s_j),
                    Rel::Disjoint => fd * 0.0,
                };
                let mut w = 0.0;
                rr_iter(&mut w, fd.iter(), an.iter());
                w
            })
        })),
    ];

    checks
        .into_iter()
        .map(|(name, f)| CheckResult {
            name: name.to_string(),
            max_residual: f(&insts),
            tol: FD_TOL,
        })
        .collect()
}
