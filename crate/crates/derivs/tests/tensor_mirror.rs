//! Rebuilds the two hardest Hessian tensors with the tensor-operator
//! calculus (page products, rotations, cross operators) and checks the
//! scalar sweep against that algebraic form to near machine precision.

use derivs::id_so;
use dynamics::rnea;
use model::{parse_model, random_state, KinematicTree};
use spatial::{
    coriolis_tensor, crf_bar, crossf_op, crossfbar_op, crossm_op, mtprod, tmprod, Tensor3,
};

fn models() -> Vec<KinematicTree> {
    let ball_arm = r#"{
        "name": "ball-arm", "gravity": [0.0, 0.0, -9.81],
        "joints": [
          { "id": 1, "parent": 0, "type": "spherical",
            "placement": { "xyz": [0,0,0.3], "rpy": [0.1,0,0.2] },
            "inertia": { "mass": 1.4, "com": [0.1,0.02,0.05], "I": [0.02,0.03,0.025,0.002,0,0.001] } },
          { "id": 2, "parent": 1, "type": "revolute", "axis": [0,1,0],
            "placement": { "xyz": [0.25,0,0], "rpy": [0,0.3,0] },
            "inertia": { "mass": 0.7, "com": [0.12,0,0], "I": [0.008,0.01,0.009,0,0.001,0] } }
        ]
    }"#;
    let mixed_chain = r#"{
        "name": "mixed3", "gravity": [0.1, -0.2, -9.81],
        "joints": [
          { "id": 1, "parent": 0, "type": "revolute", "axis": [0,0,1],
            "placement": { "xyz": [0,0,0.1], "rpy": [0.05,0,0] },
            "inertia": { "mass": 1.1, "com": [0.1,0,0.02], "I": [0.01,0.02,0.015,0.001,0,0] } },
          { "id": 2, "parent": 1, "type": "spherical",
            "placement": { "xyz": [0.2,0,0], "rpy": [0,0.2,0.1] },
            "inertia": { "mass": 0.9, "com": [0.05,0.05,0.0], "I": [0.012,0.01,0.014,0,0.002,0] } },
          { "id": 3, "parent": 2, "type": "prismatic", "axis": [1,0,0],
            "placement": { "xyz": [0.1,0.15,0], "rpy": [0.3,0,0] },
            "inertia": { "mass": 0.6, "com": [0.08,0,0.01], "I": [0.006,0.008,0.007,0,0,0.001] } }
        ]
    }"#;
    let floating = r#"{
        "name": "float-arm", "gravity": [0.0, 0.0, -9.81],
        "joints": [
          { "id": 1, "parent": 0, "type": "free",
            "placement": { "xyz": [0,0,0], "rpy": [0,0,0] },
            "inertia": { "mass": 2.2, "com": [0.0,0.05,0.1], "I": [0.05,0.04,0.06,0.005,0,0.002] } },
          { "id": 2, "parent": 1, "type": "revolute", "axis": [1,0,0],
            "placement": { "xyz": [0.1,0,0.2], "rpy": [0,0.4,0] },
            "inertia": { "mass": 0.8, "com": [0.1,0,0], "I": [0.009,0.011,0.01,0,0.001,0] } }
        ]
    }"#;
    [ball_arm, mixed_chain, floating].iter().map(|s| parse_model(s).unwrap()).collect()
}

/// Assemble d2tau_dq2 and d2tau_dqd2 by joint-triple blocks written in
/// tensor-operator form, then scatter with the slot rules.
fn mirror(tree: &KinematicTree, st: &model::RobotState) -> (Tensor3, Tensor3) {
    let (_, cache) = rnea(tree, st, None);
    let kin = &cache.kin;
    let nv = tree.nv();
    let mut qq = Tensor3::zeros(nv, nv, nv);
    let mut vv = Tensor3::zeros(nv, nv, nv);

    for i in 0..tree.n_bodies() {
        let ic = cache.ic[i];
        let bc = cache.bc[i];
        let si = &kin.s[i];
        let b2 = &coriolis_tensor(&ic, si) * 2.0;
        let big2 = &(&(&coriolis_tensor(&ic, &kin.psid[i]) + &tmprod(&crossf_op(si), &bc))
            - &mtprod(&bc, &crossm_op(si)))
            * 2.0;
        let xfic = &tmprod(&crossf_op(si), &ic) - &mtprod(&ic, &crossm_op(si));
        let dop = &crossfbar_op(&(ic * si)) + &tmprod(&crossf_op(si), &ic);
        let cb_bts = crossfbar_op(&(bc.transpose() * si * 2.0));
        let cb_ics = crossfbar_op(&(ic * si));
        let wq = bc * &kin.psid[i] * 2.0 + ic * &kin.psidd[i] + crf_bar(&cache.fc[i]) * si;

        for &j in tree.ancestors(i) {
            let (sj, pdj, pddj) = (&kin.s[j], &kin.psid[j], &kin.psidd[j]);
            let j_lt_i = j != i;
            for &k in tree.ancestors(j) {
                let (sk, pdk, pddk) = (&kin.s[k], &kin.psid[k], &kin.psidd[k]);
                let k_lt_j = k != j;

                let a_blk = &(&(&mtprod(&pdj.transpose(), &tmprod(&b2, pdk))
                    + &mtprod(&sj.transpose(), &tmprod(&cb_bts, pdk)))
                    + &mtprod(&sj.transpose(), &tmprod(&cb_ics, pddk)))
                    .rot23()
                    .rot12()
                    * -1.0;
                let b_blk = mtprod(
                    &sk.transpose(),
                    &(&(&tmprod(&big2, pdj) + &tmprod(&xfic, pddj)).rot23()
                        + &tmprod(&crossf_op(sj), &wq)),
                );
                let c_blk = mtprod(&sj.transpose(), &(&tmprod(&big2, pdk) + &tmprod(&xfic, pddk)));

                let v_a = &mtprod(&sj.transpose(), &tmprod(&b2, sk)).rot23().rot12() * -1.0;
                let v_b = &mtprod(&sj.transpose(), &tmprod(&xfic, sk)).rot23().rot12() * -1.0;
                let v_c = mtprod(&sk.transpose(), &tmprod(&b2, sj)).rot23();
                let v_d = mtprod(&sk.transpose(), &tmprod(&dop, sj)).rot23();
                let v_e = mtprod(&sj.transpose(), &tmprod(&b2, sk));

                let (di, dj, dk) = (tree.joint_dofs(i), tree.joint_dofs(j), tree.joint_dofs(k));
                for (lp, dp) in di.clone().enumerate() {
                    for (lt, dt) in dj.clone().enumerate() {
                        for (lr, dr) in dk.clone().enumerate() {
                            qq[(dp, dt, dr)] = a_blk[(lp, lt, lr)];
                            if k_lt_j {
                                qq[(dp, dr, dt)] = a_blk[(lp, lt, lr)];
                                qq[(dr, dp, dt)] = b_blk[(lr, lp, lt)];
                                if j_lt_i {
                                    qq[(dr, dt, dp)] = b_blk[(lr, lp, lt)];
                                }
                            }
                            if j_lt_i {
                                qq[(dt, dr, dp)] = c_blk[(lt, lr, lp)];
                                qq[(dt, dp, dr)] = c_blk[(lt, lr, lp)];
                            }

                            if k_lt_j {
                                vv[(dp, dt, dr)] = v_a[(lp, lt, lr)];
                                vv[(dp, dr, dt)] = v_a[(lp, lt, lr)];
                                if j_lt_i {
                                    vv[(dr, dp, dt)] = v_c[(lr, lp, lt)];
                                    vv[(dr, dt, dp)] = v_c[(lr, lp, lt)];
                                } else {
                                    vv[(dr, dp, dt)] = v_d[(lr, lp, lt)];
                                }
                            } else {
                                vv[(dp, dt, dr)] = v_b[(lp, lt, lr)];
                            }
                            if j_lt_i {
                                vv[(dt, dr, dp)] = v_e[(lt, lr, lp)];
                                vv[(dt, dp, dr)] = v_e[(lt, lr, lp)];
                            }
                        }
                    }
                }
            }
        }
    }
    (qq, vv)
}

#[test]
fn operator_form_matches_sweep() {
    for (m, tree) in models().into_iter().enumerate() {
        let st = random_state(&tree, 90 + m as u64);
        let so = id_so(&tree, &st);
        let (qq, vv) = mirror(&tree, &st);
        let scale = so.d2tau_dq2.max_abs().max(1.0);
        let dq = (&qq - &so.d2tau_dq2).max_abs();
        let dv = (&vv - &so.d2tau_dqd2).max_abs();
        assert!(dq <= 1e-10 * scale, "model {m}: qq mismatch {dq}");
        assert!(dv <= 1e-10 * scale, "model {m}: vv mismatch {dv}");
    }
}
