//! Immutable kinematic tree: topology, placements, inertias, and the
//! precomputed index sets the derivative algorithms rely on.

use nalgebra::DVector;
use spatial::{SpatialInertia, SpatialTransform, Vec3};
use thiserror::Error;

use crate::joint::JointModel;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error at line {line} column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("model has no joints")]
    Empty,
    #[error("joint ids must be 1..N in order; expected {expected}, found {found}")]
    BadId { expected: usize, found: usize },
    #[error("joint {id}: parent {parent} is not an earlier joint (forward reference or cycle)")]
    BadParent { id: usize, parent: usize },
    #[error("joint {id}: unknown joint type {found:?}")]
    UnknownKind { id: usize, found: String },
    #[error("joint {id}: {kind} joints require a unit axis")]
    MissingAxis { id: usize, kind: String },
    #[error("joint {id}: axis norm {norm} is not within 1e-6 of 1")]
    NonUnitAxis { id: usize, norm: f64 },
    #[error("joint {id}: inertia is not positive semidefinite ({detail})")]
    NonPsdInertia { id: usize, detail: String },
    #[error("joint {id}: {what} contains a non-finite value")]
    NonFinite { id: usize, what: String },
    #[error("contact {index}: body {body} is not a joint id in 1..{n}")]
    BadContactBody { index: usize, body: usize, n: usize },
    #[error("state {what}: expected length {expected}, got {got}")]
    StateLength { what: String, expected: usize, got: usize },
    #[error("state {what} contains a non-finite value")]
    StateNonFinite { what: String },
}

/// A point contact attached to a body, expressed in that body's frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactPoint {
    pub body: usize,
    pub point: Vec3,
}

/// Robot model. Bodies/joints are indexed 0..N-1 (the model file's 1-based
/// ids minus one); `parent` is `None` for joints hanging off the fixed base.
#[derive(Clone, Debug)]
pub struct KinematicTree {
    pub name: String,
    pub gravity: Vec3,
    joints: Vec<JointModel>,
    parent: Vec<Option<usize>>,
    placement: Vec<SpatialTransform>,
    inertia: Vec<SpatialInertia>,
    contacts: Vec<ContactPoint>,
    nv: usize,
    nq: usize,
    dof_offset: Vec<usize>,
    q_offset: Vec<usize>,
    dof_joint: Vec<(usize, usize)>,
    ancestors: Vec<Vec<usize>>,
    subtree: Vec<Vec<usize>>,
    anc_mask: Vec<bool>,
    depth: usize,
}

impl KinematicTree {
    pub fn new(
        name: String,
        gravity: Vec3,
        joints: Vec<JointModel>,
        parent: Vec<Option<usize>>,
        placement: Vec<SpatialTransform>,
        inertia: Vec<SpatialInertia>,
        contacts: Vec<ContactPoint>,
    ) -> Result<Self, ModelError> {
        let n = joints.len();
        if n == 0 {
            return Err(ModelError::Empty);
        }
        assert_eq!(parent.len(), n);
        assert_eq!(placement.len(), n);
        assert_eq!(inertia.len(), n);
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= i {
                    return Err(ModelError::BadParent { id: i + 1, parent: p + 1 });
                }
            }
        }
        for (idx, c) in contacts.iter().enumerate() {
            if c.body >= n {
                return Err(ModelError::BadContactBody { index: idx, body: c.body + 1, n });
            }
        }

        let mut dof_offset = Vec::with_capacity(n);
        let mut q_offset = Vec::with_capacity(n);
        let mut dof_joint = Vec::new();
        let (mut nv, mut nq) = (0usize, 0usize);
        for (i, j) in joints.iter().enumerate() {
            dof_offset.push(nv);
            q_offset.push(nq);
            for t in 0..j.nv() {
                dof_joint.push((i, t));
            }
            nv += j.nv();
            nq += j.nq();
        }

        let mut ancestors: Vec<Vec<usize>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut a = match parent[i] {
                Some(p) => ancestors[p].clone(),
                None => Vec::new(),
            };
            a.push(i);
            ancestors.push(a);
        }
        let mut subtree: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut anc_mask = vec![false; n * n];
        for i in 0..n {
            for &j in &ancestors[i] {
                subtree[j].push(i);
                anc_mask[j * n + i] = true;
            }
        }
        let depth = ancestors.iter().map(Vec::len).max().unwrap_or(0);

        Ok(KinematicTree {
            name,
            gravity,
            joints,
            parent,
            placement,
            inertia,
            contacts,
            nv,
            nq,
            dof_offset,
            q_offset,
            dof_joint,
            ancestors,
            subtree,
            anc_mask,
            depth,
        })
    }

    /// Number of joints (= number of moving bodies).
    pub fn n_bodies(&self) -> usize {
        self.joints.len()
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn nq(&self) -> usize {
        self.nq
    }

    /// Longest root-to-leaf chain length.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn joint(&self, i: usize) -> &JointModel {
        &self.joints[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn placement(&self, i: usize) -> &SpatialTransform {
        &self.placement[i]
    }

    pub fn inertia(&self, i: usize) -> &SpatialInertia {
        &self.inertia[i]
    }

    pub fn contacts(&self) -> &[ContactPoint] {
        &self.contacts
    }

    pub fn with_contacts(mut self, contacts: Vec<ContactPoint>) -> Result<Self, ModelError> {
        for (idx, c) in contacts.iter().enumerate() {
            if c.body >= self.n_bodies() {
                return Err(ModelError::BadContactBody {
                    index: idx,
                    body: c.body + 1,
                    n: self.n_bodies(),
                });
            }
        }
        self.contacts = contacts;
        Ok(self)
    }

    /// Ordered inclusive ancestor set {j : j ⪯ i}, root first.
    pub fn ancestors(&self, i: usize) -> &[usize] {
        &self.ancestors[i]
    }

    /// Ordered inclusive subtree {j : j ⪰ i}.
    pub fn subtree(&self, i: usize) -> &[usize] {
        &self.subtree[i]
    }

    /// True iff j ⪯ i (j is i or an ancestor of i).
    pub fn leq(&self, j: usize, i: usize) -> bool {
        self.anc_mask[j * self.joints.len() + i]
    }

    /// First velocity index of joint i.
    pub fn dof_offset(&self, i: usize) -> usize {
        self.dof_offset[i]
    }

    /// First configuration index of joint i.
    pub fn q_offset(&self, i: usize) -> usize {
        self.q_offset[i]
    }

    /// Velocity index range of joint i.
    pub fn joint_dofs(&self, i: usize) -> std::ops::Range<usize> {
        self.dof_offset[i]..self.dof_offset[i] + self.joints[i].nv()
    }

    /// Maps a flat velocity index to (joint, dof-within-joint).
    pub fn dof_joint(&self, dof: usize) -> (usize, usize) {
        self.dof_joint[dof]
    }

    /// Joint i's configuration slice of q.
    pub fn joint_q<'a>(&self, q: &'a DVector<f64>, i: usize) -> &'a [f64] {
        let o = self.q_offset[i];
        &q.as_slice()[o..o + self.joints[i].nq()]
    }
}
