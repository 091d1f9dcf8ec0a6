//! Generator determinism, topology invariants, and joint kinematics.

use approx::assert_relative_eq;
use model::{joint_kinematics, random_model, random_model_file, JointModel};
use nalgebra::Rotation3;
use spatial::{Mat3, Vec3};

#[test]
fn zero_branching_gives_serial_chain() {
    let tree = random_model(5, 42, 0.0);
    assert_eq!(tree.parent(0), None);
    for i in 1..5 {
        assert_eq!(tree.parent(i), Some(i - 1));
    }
    assert_eq!(tree.depth(), 5);
}

#[test]
fn generator_is_deterministic() {
    let a = random_model_file(12, 9, 0.35).to_json();
    let b = random_model_file(12, 9, 0.35).to_json();
    assert_eq!(a, b);
    let c = random_model_file(12, 10, 0.35).to_json();
    assert_ne!(a, c);
}

#[test]
fn generated_tree_satisfies_invariants() {
    let tree = random_model(30, 7, 0.3);
    let n = tree.n_bodies();
    assert_eq!(n, 30);

    // Ancestor/subtree duality and mask consistency.
    for i in 0..n {
        for j in 0..n {
            let by_anc = tree.ancestors(i).contains(&j);
            let by_sub = tree.subtree(j).contains(&i);
            assert_eq!(by_anc, by_sub);
            assert_eq!(by_anc, tree.leq(j, i));
        }
        // Ancestor list is parent-closed and ends at i.
        assert_eq!(*tree.ancestors(i).last().unwrap(), i);
        if let Some(p) = tree.parent(i) {
            assert!(tree.ancestors(i).contains(&p));
        }
    }

    // DoF bookkeeping.
    let mut acc = 0;
    for i in 0..n {
        assert_eq!(tree.dof_offset(i), acc);
        for (t, d) in tree.joint_dofs(i).enumerate() {
            assert_eq!(tree.dof_joint(d), (i, t));
        }
        acc += tree.joint(i).nv();
    }
    assert_eq!(acc, tree.nv());
    assert!(tree.depth() <= n && tree.depth() >= 1);
}

#[test]
fn generator_draws_every_joint_kind() {
    let tree = random_model(40, 1, 0.2);
    let mut seen = [false; 4];
    for i in 0..tree.n_bodies() {
        let k = match tree.joint(i) {
            JointModel::Revolute { .. } => 0,
            JointModel::Prismatic { .. } => 1,
            JointModel::Spherical => 2,
            JointModel::Free => 3,
        };
        seen[k] = true;
    }
    assert_eq!(seen, [true; 4]);
}

#[test]
fn revolute_z_joint_kinematics() {
    let j = JointModel::Revolute { axis: Vec3::z() };
    let (x, s) = joint_kinematics(&j, &[0.0]);
    assert_relative_eq!(x.rot, Mat3::identity(), epsilon = 1e-15);
    assert_relative_eq!(x.pos, Vec3::zeros(), epsilon = 1e-15);
    assert_eq!(s.ncols(), 1);
    let col: Vec<f64> = s.column(0).iter().cloned().collect();
    assert_eq!(col, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);

    let (x, _) = joint_kinematics(&j, &[std::f64::consts::FRAC_PI_2]);
    let rz = Rotation3::from_axis_angle(&Vec3::z_axis(), std::f64::consts::FRAC_PI_2);
    assert_relative_eq!(x.rot, *rz.matrix(), epsilon = 1e-15);
}

#[test]
fn prismatic_joint_translates_along_axis() {
    let j = JointModel::Prismatic { axis: Vec3::x() };
    let (x, s) = joint_kinematics(&j, &[0.7]);
    // The body origin lands at 0.7 along x in the anchor frame.
    assert_relative_eq!(x.transform_point(&Vec3::zeros()), Vec3::new(0.7, 0.0, 0.0));
    let col: Vec<f64> = s.column(0).iter().cloned().collect();
    assert_eq!(col, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn free_joint_subspace_is_identity() {
    let (x, s) = joint_kinematics(&JointModel::Free, &[0.0, 0.0, 0.0, 1.0, 0.2, -0.3, 0.5]);
    assert_eq!(s.ncols(), 6);
    for r in 0..6 {
        for c in 0..6 {
            assert_eq!(s[(r, c)], if r == c { 1.0 } else { 0.0 });
        }
    }
    assert_relative_eq!(
        x.transform_point(&Vec3::zeros()),
        Vec3::new(0.2, -0.3, 0.5),
        epsilon = 1e-15
    );
}

#[test]
fn spherical_joint_rotation_matches_quaternion() {
    let quat = nalgebra::UnitQuaternion::from_axis_angle(&Vec3::y_axis(), 0.8);
    let qj = [quat.coords[0], quat.coords[1], quat.coords[2], quat.coords[3]];
    let (x, s) = joint_kinematics(&JointModel::Spherical, &qj);
    assert_relative_eq!(x.rot, *quat.to_rotation_matrix().matrix(), epsilon = 1e-14);
    assert_relative_eq!(x.pos, Vec3::zeros());
    assert_eq!(s.ncols(), 3);
    for c in 0..3 {
        let col = s.column(c);
        assert_eq!(col[c], 1.0);
        assert_eq!(col.iter().map(|x| x.abs()).sum::<f64>(), 1.0);
    }
}

#[test]
fn one_dof_subspace_columns_are_unit() {
    let tree = random_model(25, 8, 0.25);
    let state = model::random_state(&tree, 3);
    for i in 0..tree.n_bodies() {
        let (_, s) = joint_kinematics(tree.joint(i), tree.joint_q(&state.q, i));
        if tree.joint(i).nv() == 1 {
            assert_relative_eq!(s.column(0).norm(), 1.0, epsilon = 1e-12);
        }
        assert!(s.iter().all(|x| x.is_finite()));
    }
}
