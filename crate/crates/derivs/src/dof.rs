//! Flat per-dof copies of the joint subspace columns and their rates, so
//! the derivative sweeps can index by velocity coordinate instead of by
//! (joint, column) pairs.

use dynamics::KinematicsCache;
use model::KinematicTree;
use spatial::SpatialMotionVec;

pub(crate) struct DofVecs {
    pub s: Vec<SpatialMotionVec>,
    pub phid: Vec<SpatialMotionVec>,
    pub psid: Vec<SpatialMotionVec>,
    pub psidd: Vec<SpatialMotionVec>,
}

pub(crate) fn flatten(tree: &KinematicTree, kin: &KinematicsCache) -> DofVecs {
    let nv = tree.nv();
    let mut out = DofVecs {
        s: Vec::with_capacity(nv),
        phid: Vec::with_capacity(nv),
        psid: Vec::with_capacity(nv),
        psidd: Vec::with_capacity(nv),
    };
    for i in 0..tree.n_bodies() {
        for c in 0..kin.s[i].ncols() {
            out.s.push(kin.s[i].column(c).into_owned());
            out.phid.push(kin.phid[i].column(c).into_owned());
            out.psid.push(kin.psid[i].column(c).into_owned());
            out.psidd.push(kin.psidd[i].column(c).into_owned());
        }
    }
    debug_assert_eq!(out.s.len(), nv);
    out
}
