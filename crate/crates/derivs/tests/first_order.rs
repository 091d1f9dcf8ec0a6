use derivs::{fext_cumulative_fo, id_fo, id_fo_constrained, id_fo_with_visits};
use dynamics::{contact_jacobian, forward_pass, rnea, ContactSpec};
use fdcheck::{compare_matrices, fd_jacobian_robot, Var};
use model::{parse_model, random_model, random_state, ContactPoint, KinematicTree, RobotState};
use nalgebra::{DVector, Vector6};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spatial::{force_vec, Vec3};

const H: f64 = 4e-6;
const TOL_FO: f64 = 1e-6;

/// Relative compare with an absolute floor scaled to the data: entries far
/// below the matrix's own magnitude carry only finite-difference noise.
fn assert_close(an: &nalgebra::DMatrix<f64>, fd: &nalgebra::DMatrix<f64>, what: &str) {
    let floor = fd.amax().max(0.1);
    let r = compare_matrices(an, fd, TOL_FO, TOL_FO * floor);
    assert!(r.pass, "{what}: {r:?}");
}

fn pendulum() -> KinematicTree {
    parse_model(
        r#"{
        "name": "pendulum", "gravity": [0.0, -9.81, 0.0],
        "joints": [{ "id": 1, "parent": 0, "type": "revolute", "axis": [0,0,1],
          "placement": { "xyz": [0,0,0], "rpy": [0,0,0] },
          "inertia": { "mass": 1.0, "com": [1.0,0.0,0.0], "I": [0,0,0,0,0,0] } }]
    }"#,
    )
    .unwrap()
}

/// Two chains hanging off a common root joint; the branches share no dofs.
fn fork() -> KinematicTree {
    parse_model(
        r#"{
        "name": "fork", "gravity": [0.0, 0.0, -9.81],
        "joints": [
          { "id": 1, "parent": 0, "type": "revolute", "axis": [0,0,1],
            "placement": { "xyz": [0,0,0.2], "rpy": [0,0,0] },
            "inertia": { "mass": 1.0, "com": [0.1,0,0], "I": [0.02,0.02,0.01,0,0,0] } },
          { "id": 2, "parent": 1, "type": "revolute", "axis": [0,1,0],
            "placement": { "xyz": [0.3,0,0], "rpy": [0,0,0] },
            "inertia": { "mass": 0.8, "com": [0.1,0,0.05], "I": [0.01,0.015,0.01,0,0,0] } },
          { "id": 3, "parent": 1, "type": "prismatic", "axis": [1,0,0],
            "placement": { "xyz": [-0.3,0.1,0], "rpy": [0,0.2,0] },
            "inertia": { "mass": 0.6, "com": [0,0.1,0], "I": [0.008,0.006,0.01,0,0,0] } }
        ]
    }"#,
    )
    .unwrap()
}

fn instance(seed: u64) -> (KinematicTree, RobotState) {
    let n = 3 + (seed % 7) as usize;
    let tree = random_model(n, 4000 + seed, if seed % 3 == 0 { 0.0 } else { 0.35 });
    let st = random_state(&tree, 4100 + seed);
    (tree, st)
}

fn contact_instance(seed: u64) -> (KinematicTree, RobotState, ContactSpec, DVector<f64>) {
    let (tree, st) = instance(seed);
    let mut r = ChaCha8Rng::seed_from_u64(4200 + seed);
    let pts = (0..2)
        .map(|_| ContactPoint {
            body: r.random_range(0..tree.n_bodies()),
            point: Vec3::from_fn(|_, _| r.random_range(-0.5..0.5)),
        })
        .collect();
    let spec = ContactSpec::new(&tree, pts);
    let lambda = DVector::from_fn(spec.n_c(), |_, _| r.random_range(-2.0..2.0));
    (tree, st, spec, lambda)
}

fn tau_constrained(
    tree: &KinematicTree,
    st: &RobotState,
    spec: &ContactSpec,
    lambda: &DVector<f64>,
) -> DVector<f64> {
    let jc = contact_jacobian(tree, &st.q, &DVector::zeros(tree.nv()), spec).jc;
    rnea(tree, st, None).0 - jc.transpose() * lambda
}

#[test]
fn pendulum_closed_forms() {
    let tree = pendulum();
    let at = |q0: f64| RobotState {
        q: DVector::from_element(1, q0),
        qd: DVector::zeros(1),
        qdd: DVector::zeros(1),
    };
    // tau = qdd + 9.81 cos(q): the configuration gradient at q = pi/2 is
    // -9.81, and with no motion there is no velocity coupling at all.
    let fo = id_fo(&tree, &at(std::f64::consts::FRAC_PI_2));
    assert!((fo.dtau_dq[(0, 0)] + 9.81).abs() < 1e-10, "got {}", fo.dtau_dq[(0, 0)]);
    assert_eq!(fo.dtau_dqd[(0, 0)], 0.0);
}

#[test]
fn matches_finite_differences() {
    for seed in 0..20 {
        let (tree, st) = instance(seed);
        let fo = id_fo(&tree, &st);
        let fd_q = fd_jacobian_robot(&tree, &st, Var::Q, H, |s| rnea(&tree, s, None).0);
        let fd_qd = fd_jacobian_robot(&tree, &st, Var::Qd, H, |s| rnea(&tree, s, None).0);
        assert_close(&fo.dtau_dq, &fd_q, &format!("seed {seed} dtau_dq"));
        assert_close(&fo.dtau_dqd, &fd_qd, &format!("seed {seed} dtau_dqd"));
    }
}

#[test]
fn constrained_matches_finite_differences() {
    for seed in 0..20 {
        let (tree, st, spec, lambda) = contact_instance(seed);
        let fo = id_fo_constrained(&tree, &st, &spec, &lambda);
        let fd_q =
            fd_jacobian_robot(&tree, &st, Var::Q, H, |s| tau_constrained(&tree, s, &spec, &lambda));
        assert_close(&fo.dtau_dq, &fd_q, &format!("seed {seed} constrained dtau_dq"));
        // The contact load is configuration-only: the velocity block must be
        // the free one.
        assert_eq!(fo.dtau_dqd, id_fo(&tree, &st).dtau_dqd);
    }
}

#[test]
fn constrained_with_zero_lambda_is_free() {
    let (tree, st, spec, _) = contact_instance(3);
    let fo = id_fo_constrained(&tree, &st, &spec, &DVector::zeros(spec.n_c()));
    let free = id_fo(&tree, &st);
    assert_eq!(fo.dtau_dq, free.dtau_dq);
    assert_eq!(fo.dtau_dqd, free.dtau_dqd);
}

#[test]
fn cumulative_wrench_gradients_match_finite_differences() {
    for seed in 0..8 {
        let (tree, st, spec, lambda) = contact_instance(seed);
        let grads = fext_cumulative_fo(&tree, &st.q, &spec, &lambda);
        let n = tree.n_bodies();
        let fd = fd_jacobian_robot(&tree, &st, Var::Q, H, |s| {
            // Independent recomputation of every cumulative subtree wrench.
            let frozen = RobotState {
                q: s.q.clone(),
                qd: DVector::zeros(tree.nv()),
                qdd: DVector::zeros(tree.nv()),
            };
            let kin = forward_pass(&tree, &frozen);
            let mut per = vec![Vector6::<f64>::zeros(); n];
            for (c, pt) in spec.points.iter().enumerate() {
                let l = Vec3::new(lambda[3 * c], lambda[3 * c + 1], lambda[3 * c + 2]);
                let p = kin.x0[pt.body].transform_point(&pt.point);
                let w = force_vec(p.cross(&l), l);
                for &a in tree.ancestors(pt.body) {
                    per[a] += w;
                }
            }
            DVector::from_fn(6 * n, |r, _| per[r / 6][r % 6])
        });
        for i in 0..n {
            let block = fd.view((6 * i, 0), (6, tree.nv())).into_owned();
            assert_close(&grads[i], &block, &format!("seed {seed} body {i}"));
        }
    }
}

#[test]
fn disjoint_branches_decouple() {
    let tree = fork();
    let st = random_state(&tree, 17);
    let fo = id_fo(&tree, &st);
    // Joints 1 and 2 live on different branches: neither torque can see the
    // other joint's coordinate, so those blocks are never even written.
    assert_eq!(fo.dtau_dq[(1, 2)], 0.0);
    assert_eq!(fo.dtau_dq[(2, 1)], 0.0);
    assert_eq!(fo.dtau_dqd[(1, 2)], 0.0);
    assert_eq!(fo.dtau_dqd[(2, 1)], 0.0);

    // A contact on one branch never loads the other branch's wrench sums.
    let spec = ContactSpec::new(&tree, vec![ContactPoint { body: 1, point: Vec3::new(0.1, 0.0, 0.0) }]);
    let lambda = DVector::from_vec(vec![1.0, -2.0, 0.5]);
    let grads = fext_cumulative_fo(&tree, &st.q, &spec, &lambda);
    assert_eq!(grads[2].amax(), 0.0);
}

#[test]
fn pair_visits_are_quadratic_in_depth() {
    for n in [8usize, 16, 32, 64] {
        let tree = random_model(n, 900 + n as u64, 0.0);
        let st = random_state(&tree, 901 + n as u64);
        let (_, visits) = id_fo_with_visits(&tree, &st);
        assert_eq!(visits, n * (n + 1) / 2, "chain of {n}");
    }
}
