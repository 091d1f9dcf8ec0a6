//! Seeded random models and states for tests and benchmarks.

use nalgebra::DVector;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::file::{InertiaEntry, JointEntry, ModelFile, PlacementEntry};
use crate::joint::JointModel;
use crate::state::RobotState;
use crate::tree::KinematicTree;

fn unit3(r: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.2 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Deterministic random model description. `branching` is the probability
/// that a joint attaches to a uniformly chosen earlier body instead of the
/// immediately preceding one (0 gives a serial chain).
pub fn random_model_file(n: usize, seed: u64, branching: f64) -> ModelFile {
    assert!(n >= 1, "need at least one joint");
    assert!((0.0..=1.0).contains(&branching), "branching must be a probability");
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut joints = Vec::with_capacity(n);
    for i in 1..=n {
        let parent = if i == 1 {
            0
        } else if r.random_range(0.0..1.0) < branching {
            r.random_range(0..i - 1)
        } else {
            i - 1
        };
        let (kind, axis) = match r.random_range(0..4) {
            0 => ("revolute", Some(unit3(&mut r))),
            1 => ("prismatic", Some(unit3(&mut r))),
            2 => ("spherical", None),
            _ => ("free", None),
        };
        let xyz = [
            r.random_range(-0.8..0.8),
            r.random_range(-0.8..0.8),
            r.random_range(-0.8..0.8),
        ];
        let rpy = [
            r.random_range(-3.0..3.0),
            r.random_range(-1.4..1.4),
            r.random_range(-3.0..3.0),
        ];
        let mass = r.random_range(0.1..2.0);
        let com = [
            r.random_range(-0.5..0.5),
            r.random_range(-0.5..0.5),
            r.random_range(-0.5..0.5),
        ];
        // L·Lᵀ plus a diagonal floor keeps the rotational inertia safely PSD.
        let l = nalgebra::Matrix3::from_fn(|_, _| r.random_range(-0.4..0.4));
        let ic = l * l.transpose() + nalgebra::Matrix3::identity() * 0.05;
        let i_packed = [
            ic[(0, 0)],
            ic[(1, 1)],
            ic[(2, 2)],
            ic[(0, 1)],
            ic[(0, 2)],
            ic[(1, 2)],
        ];
        joints.push(JointEntry {
            id: i,
            parent,
            kind: kind.to_string(),
            axis,
            placement: PlacementEntry { xyz, rpy },
            inertia: InertiaEntry { mass, com, i: i_packed },
        });
    }
    ModelFile {
        name: format!("random-n{n}-s{seed}"),
        gravity: [0.0, 0.0, -9.81],
        joints,
        contacts: Vec::new(),
    }
}

/// Deterministic random tree; see [`random_model_file`].
pub fn random_model(n: usize, seed: u64, branching: f64) -> KinematicTree {
    random_model_file(n, seed, branching)
        .into_tree()
        .expect("generated model must satisfy the tree invariants")
}

/// Deterministic random state with unit-scale coordinates and unit
/// quaternions for the rotational joints.
pub fn random_state(tree: &KinematicTree, seed: u64) -> RobotState {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut q = DVector::zeros(tree.nq());
    for i in 0..tree.n_bodies() {
        let o = tree.q_offset(i);
        match tree.joint(i) {
            JointModel::Revolute { .. } | JointModel::Prismatic { .. } => {
                q[o] = r.random_range(-1.0..1.0);
            }
            JointModel::Spherical => write_unit_quat(&mut r, q.as_mut_slice(), o),
            JointModel::Free => {
                write_unit_quat(&mut r, q.as_mut_slice(), o);
                for k in 0..3 {
                    q[o + 4 + k] = r.random_range(-1.0..1.0);
                }
            }
        }
    }
    let qd = DVector::from_fn(tree.nv(), |_, _| r.random_range(-1.0..1.0));
    let qdd = DVector::from_fn(tree.nv(), |_, _| r.random_range(-1.0..1.0));
    RobotState { q, qd, qdd }
}

fn write_unit_quat(r: &mut ChaCha8Rng, q: &mut [f64], o: usize) {
    loop {
        let c = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        ];
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.2 {
            for k in 0..4 {
                q[o + k] = c[k] / n;
            }
            return;
        }
    }
}
