use dynamics::{forward_pass, forward_pass_with_gravity};
use model::{random_model, random_state, RobotState};
use nalgebra::DVector;
use spatial::{cross_motion, motion_vec, SpatialMotionVec, Vec3};

#[test]
fn chain_at_rest_carries_only_the_gravity_offset() {
    let tree = random_model(6, 11, 0.0);
    let st = RobotState::zeros(&tree);
    let kin = forward_pass(&tree, &st);
    let a0 = motion_vec(Vec3::zeros(), -tree.gravity);
    for i in 0..tree.n_bodies() {
        assert!(kin.v[i].norm() == 0.0, "body {i} moving at rest");
        assert!((kin.a[i] - a0).norm() < 1e-15, "body {i} accel != gravity offset");
    }
}

#[test]
fn flattened_velocity_and_acceleration_sums() {
    for seed in 0..20u64 {
        let tree = random_model(3 + (seed % 9) as usize, 100 + seed, 0.4);
        let st = random_state(&tree, 500 + seed);
        let kin = forward_pass(&tree, &st);
        for i in 0..tree.n_bodies() {
            // v_i = Σ_{j⪯i} S_j q̇_j, independent of the parent-to-child chaining.
            let mut v = SpatialMotionVec::zeros();
            let mut a = kin.a0;
            for &j in tree.ancestors(i) {
                let vj = kin.joint_v(&tree, j, &st.qd);
                let mut sqdd = SpatialMotionVec::zeros();
                for (t, d) in tree.joint_dofs(j).enumerate() {
                    sqdd += kin.s[j].column(t) * st.qdd[d];
                }
                a += sqdd + cross_motion(&kin.v[j], &vj);
                v += vj;
            }
            assert!((kin.v[i] - v).norm() <= 1e-13 * (1.0 + v.norm()), "v mismatch body {i}");
            assert!((kin.a[i] - a).norm() <= 1e-12 * (1.0 + a.norm()), "a mismatch body {i}");
        }
    }
}

#[test]
fn subspace_derivative_columns_match_their_definitions() {
    let tree = random_model(8, 21, 0.3);
    let st = random_state(&tree, 22);
    let kin = forward_pass(&tree, &st);
    for i in 0..tree.n_bodies() {
        let vp = kin.parent_v(&tree, i);
        let ap = kin.parent_a(&tree, i);
        for t in 0..kin.s[i].ncols() {
            let s = kin.s[i].column(t).into_owned();
            let phid = cross_motion(&kin.v[i], &s);
            let psid = cross_motion(&vp, &s);
            let psidd = cross_motion(&ap, &s) + cross_motion(&vp, &psid);
            assert!((kin.phid[i].column(t) - phid).norm() < 1e-14);
            assert!((kin.psid[i].column(t) - psid).norm() < 1e-14);
            assert!((kin.psidd[i].column(t) - psidd).norm() < 1e-14);
        }
    }
}

#[test]
fn gravity_shifts_accelerations_uniformly() {
    let tree = random_model(7, 31, 0.5);
    let st = random_state(&tree, 32);
    let with_g = forward_pass(&tree, &st);
    let no_g = forward_pass_with_gravity(&tree, &st, &Vec3::zeros());
    let shift = motion_vec(Vec3::zeros(), -tree.gravity);
    for i in 0..tree.n_bodies() {
        assert!((with_g.v[i] - no_g.v[i]).norm() == 0.0, "velocity depends on gravity");
        assert_eq!(with_g.s[i], no_g.s[i]);
        let d = with_g.a[i] - no_g.a[i];
        let scale = 1.0 + with_g.a[i].norm();
        assert!((d - shift).norm() <= 1e-13 * scale, "body {i} gravity shift not uniform");
    }
}

#[test]
#[should_panic(expected = "finite")]
fn non_finite_state_is_rejected() {
    let tree = random_model(3, 41, 0.0);
    let mut st = RobotState::zeros(&tree);
    st.qd = DVector::from_element(tree.nv(), f64::NAN);
    forward_pass(&tree, &st);
}
