use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat6 = Matrix6<f64>;

/// 6D motion vector, angular components first (0..3), linear second (3..6).
pub type SpatialMotionVec = Vector6<f64>;
/// 6D force vector, moment components first (0..3), linear force second (3..6).
pub type SpatialForceVec = Vector6<f64>;
/// Dense 6×6 spatial inertia (symmetric PSD).
pub type SpatialInertia = Matrix6<f64>;

pub fn motion_vec(ang: Vec3, lin: Vec3) -> SpatialMotionVec {
    Vector6::new(ang.x, ang.y, ang.z, lin.x, lin.y, lin.z)
}

pub fn force_vec(moment: Vec3, force: Vec3) -> SpatialForceVec {
    Vector6::new(moment.x, moment.y, moment.z, force.x, force.y, force.z)
}

pub fn ang_part(v: &Vector6<f64>) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

pub fn lin_part(v: &Vector6<f64>) -> Vec3 {
    Vec3::new(v[3], v[4], v[5])
}

pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn assemble6(tl: Mat3, tr: Mat3, bl: Mat3, br: Mat3) -> Mat6 {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&tl);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&tr);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&bl);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&br);
    m
}

/// Motion cross-product operator: crm(v)·u = v × u.
pub fn crm(v: &SpatialMotionVec) -> Mat6 {
    let w = skew(&ang_part(v));
    let x = skew(&lin_part(v));
    assemble6(w, Mat3::zeros(), x, w)
}

/// Force cross-product operator: crf(v)·f = v ×* f; crf(v) = −crm(v)ᵀ.
pub fn crf(v: &SpatialMotionVec) -> Mat6 {
    let w = skew(&ang_part(v));
    let x = skew(&lin_part(v));
    assemble6(w, x, Mat3::zeros(), w)
}

/// Swapped-order force operator: crf_bar(f)·v = crf(v)·f for every motion v.
pub fn crf_bar(f: &SpatialForceVec) -> Mat6 {
    let n = skew(&ang_part(f));
    let x = skew(&lin_part(f));
    assemble6(-n, -x, -x, Mat3::zeros())
}

/// v × u for motion vectors, computed blockwise.
pub fn cross_motion(v: &SpatialMotionVec, u: &SpatialMotionVec) -> SpatialMotionVec {
    let (w, x) = (ang_part(v), lin_part(v));
    let (a, b) = (ang_part(u), lin_part(u));
    motion_vec(w.cross(&a), x.cross(&a) + w.cross(&b))
}

/// v ×* f for a motion vector acting on a force vector, blockwise.
pub fn cross_force(v: &SpatialMotionVec, f: &SpatialForceVec) -> SpatialForceVec {
    let (w, x) = (ang_part(v), lin_part(v));
    let (n, h) = (ang_part(f), lin_part(f));
    force_vec(w.cross(&n) + x.cross(&h), w.cross(&h))
}

/// Coordinate transform between frames, stored as (R, p): R maps source-frame
/// coordinates to destination-frame coordinates, p is the destination origin
/// expressed in the source frame. Motion action: (ω; v) ↦ (Rω; R(v − p×ω)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialTransform {
    pub rot: Mat3,
    pub pos: Vec3,
}

impl SpatialTransform {
    pub fn new(rot: Mat3, pos: Vec3) -> Self {
        Self { rot, pos }
    }

    pub fn identity() -> Self {
        Self { rot: Mat3::identity(), pos: Vec3::zeros() }
    }

    /// Transform whose action maps child-frame coordinates into the parent
    /// frame is the inverse of this one; `from_pose(E, r)` builds the
    /// parent→child transform from the child's pose (axes E, origin r) in
    /// the parent frame.
    pub fn from_pose(axes_in_parent: &Mat3, origin_in_parent: &Vec3) -> Self {
        Self { rot: axes_in_parent.transpose(), pos: *origin_in_parent }
    }

    /// Apply `other` first, then `self` (map composition self ∘ other).
    pub fn compose(&self, other: &SpatialTransform) -> Self {
        Self {
            rot: self.rot * other.rot,
            pos: other.pos + other.rot.transpose() * self.pos,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { rot: self.rot.transpose(), pos: -(self.rot * self.pos) }
    }

    pub fn apply_motion(&self, v: &SpatialMotionVec) -> SpatialMotionVec {
        let w = ang_part(v);
        let x = lin_part(v);
        motion_vec(self.rot * w, self.rot * (x - self.pos.cross(&w)))
    }

    pub fn inv_apply_motion(&self, v: &SpatialMotionVec) -> SpatialMotionVec {
        let w = self.rot.transpose() * ang_part(v);
        motion_vec(w, self.rot.transpose() * lin_part(v) + self.pos.cross(&w))
    }

    pub fn apply_force(&self, f: &SpatialForceVec) -> SpatialForceVec {
        let n = ang_part(f);
        let h = lin_part(f);
        force_vec(self.rot * (n - self.pos.cross(&h)), self.rot * h)
    }

    pub fn inv_apply_force(&self, f: &SpatialForceVec) -> SpatialForceVec {
        let h = self.rot.transpose() * lin_part(f);
        force_vec(self.rot.transpose() * ang_part(f) + self.pos.cross(&h), h)
    }

    /// Point coordinate map: source-frame point → destination-frame point.
    pub fn transform_point(&self, x: &Vec3) -> Vec3 {
        self.rot * (x - self.pos)
    }

    /// Dense 6×6 motion-vector transform [[R, 0], [−Rp̂, R]].
    pub fn motion_matrix(&self) -> Mat6 {
        let rp = -self.rot * skew(&self.pos);
        assemble6(self.rot, Mat3::zeros(), rp, self.rot)
    }

    /// Dense 6×6 force-vector transform [[R, −Rp̂], [0, R]].
    pub fn force_matrix(&self) -> Mat6 {
        let rp = -self.rot * skew(&self.pos);
        assemble6(self.rot, rp, Mat3::zeros(), self.rot)
    }
}

pub fn xform_motion(x: &SpatialTransform, v: &SpatialMotionVec) -> SpatialMotionVec {
    x.apply_motion(v)
}

pub fn xform_force(x: &SpatialTransform, f: &SpatialForceVec) -> SpatialForceVec {
    x.apply_force(f)
}

/// Congruent inertia map to the destination frame: I' = M⁻ᵀ I M⁻¹ with M the
/// motion transform of `x`.
pub fn xform_inertia(x: &SpatialTransform, i: &SpatialInertia) -> SpatialInertia {
    let mi = x.inverse().motion_matrix();
    mi.transpose() * i * mi
}

/// Spatial equation of motion: I·a + v ×* (I·v).
pub fn body_wrench(i: &SpatialInertia, v: &SpatialMotionVec, a: &SpatialMotionVec) -> SpatialForceVec {
    i * a + cross_force(v, &(i * v))
}

/// Spatial inertia at the body frame origin from mass, COM offset, and the
/// 3×3 rotational inertia about the COM.
pub fn spatial_inertia(mass: f64, com: &Vec3, icom: &Mat3) -> SpatialInertia {
    let c = skew(com);
    assemble6(icom + mass * c * c.transpose(), mass * c, mass * c.transpose(), mass * Mat3::identity())
}
