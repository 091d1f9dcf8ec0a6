//! Contact-point Jacobians and their derivatives, computed analytically
//! from world-frame point kinematics. For a point fixed on body m the row
//! block of J_c maps q̇ to the world linear velocity of the point,
//! ṗ = E(p)·v_m with E(p) = [−p̂ 𝟙]. Every derivative below follows from
//! the directional-derivative laws of the forward-pass quantities (see the
//! identity suite) plus ∂p/∂q = J_c itself; the drift γ = J̇_c q̇ and its
//! derivatives come from γ = E(p)·a_bias + ω × ṗ on the gravity-free,
//! acceleration-free pass.

use model::{ContactPoint, KinematicTree, RobotState};
use nalgebra::{DMatrix, DVector};
use spatial::{ang_part, cross_motion, lin_part, SpatialMotionVec, Tensor3, Vec3};

use crate::kinematics::{forward_pass_with_gravity, KinematicsCache};

/// Point contacts (3 constraint rows each).
#[derive(Clone, Debug)]
pub struct ContactSpec {
    pub points: Vec<ContactPoint>,
}

impl ContactSpec {
    pub fn new(tree: &KinematicTree, points: Vec<ContactPoint>) -> Self {
        for p in &points {
            assert!(p.body < tree.n_bodies(), "contact body {} out of range", p.body);
        }
        ContactSpec { points }
    }

    /// The contacts embedded in the model file.
    pub fn from_tree(tree: &KinematicTree) -> Self {
        ContactSpec { points: tree.contacts().to_vec() }
    }

    pub fn n_c(&self) -> usize {
        3 * self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Per-contact geometry on the current configuration.
struct Geom {
    mb: usize,
    p: Vec3,
    pdot: Vec3,
    /// J_c columns of this contact per velocity coordinate (zero off path).
    c: Vec<Vec3>,
    on_path: Vec<bool>,
    /// Joints root→mb inclusive.
    path_joints: Vec<usize>,
}

/// Flat per-coordinate views of the forward-pass quantities plus the
/// derivative rules shared by all contact formulas.
struct Ctx<'a> {
    tree: &'a KinematicTree,
    kin: &'a KinematicsCache,
    s: Vec<SpatialMotionVec>,
    psid: Vec<SpatialMotionVec>,
    psidd: Vec<SpatialMotionVec>,
    phid: Vec<SpatialMotionVec>,
}

impl<'a> Ctx<'a> {
    fn new(tree: &'a KinematicTree, kin: &'a KinematicsCache) -> Self {
        let nv = tree.nv();
        let mut s = vec![SpatialMotionVec::zeros(); nv];
        let mut psid = vec![SpatialMotionVec::zeros(); nv];
        let mut psidd = vec![SpatialMotionVec::zeros(); nv];
        let mut phid = vec![SpatialMotionVec::zeros(); nv];
        for i in 0..tree.n_bodies() {
            for (t, d) in tree.joint_dofs(i).enumerate() {
                s[d] = kin.s[i].column(t).into_owned();
                psid[d] = kin.psid[i].column(t).into_owned();
                psidd[d] = kin.psidd[i].column(t).into_owned();
                phid[d] = kin.phid[i].column(t).into_owned();
            }
        }
        Ctx { tree, kin, s, psid, psidd, phid }
    }

    /// joint(l) ⪯ joint(a), same joint included.
    fn dof_leq(&self, l: usize, a: usize) -> bool {
        self.tree.leq(self.tree.dof_joint(l).0, self.tree.dof_joint(a).0)
    }

    fn ds(&self, a: usize, l: usize) -> SpatialMotionVec {
        if self.dof_leq(l, a) {
            cross_motion(&self.s[l], &self.s[a])
        } else {
            SpatialMotionVec::zeros()
        }
    }

    fn dpsid(&self, a: usize, l: usize) -> SpatialMotionVec {
        if self.dof_leq(l, a) {
            cross_motion(&self.psid[l], &self.s[a]) + cross_motion(&self.s[l], &self.psid[a])
        } else {
            SpatialMotionVec::zeros()
        }
    }

    fn dpsidd(&self, a: usize, l: usize) -> SpatialMotionVec {
        if self.dof_leq(l, a) {
            cross_motion(&self.psidd[l], &self.s[a])
                + cross_motion(&self.psid[l], &self.psid[a]) * 2.0
                + cross_motion(&self.s[l], &self.psidd[a])
        } else {
            SpatialMotionVec::zeros()
        }
    }

    fn dphid(&self, a: usize, l: usize) -> SpatialMotionVec {
        if self.dof_leq(l, a) {
            cross_motion(&self.psid[l], &self.s[a]) + cross_motion(&self.s[l], &self.phid[a])
        } else {
            SpatialMotionVec::zeros()
        }
    }

    /// ∂v_body/∂q_l = (v_{λ(l)} − v_body) × s_l for joint(l) ⪯ body.
    fn dv(&self, body: usize, l: usize) -> SpatialMotionVec {
        let jl = self.tree.dof_joint(l).0;
        if self.tree.leq(jl, body) {
            cross_motion(&(self.kin.parent_v(self.tree, jl) - self.kin.v[body]), &self.s[l])
        } else {
            SpatialMotionVec::zeros()
        }
    }

    /// ∂a_body/∂q_l = ψ̈_l − v_body × ψ̇_l − a_body × s_l for joint(l) ⪯ body.
    fn da(&self, body: usize, l: usize) -> SpatialMotionVec {
        let jl = self.tree.dof_joint(l).0;
        if self.tree.leq(jl, body) {
            self.psidd[l]
                - cross_motion(&self.kin.v[body], &self.psid[l])
                - cross_motion(&self.kin.a[body], &self.s[l])
        } else {
            SpatialMotionVec::zeros()
        }
    }
}

struct PointCtx<'a, 'b> {
    cx: &'b Ctx<'a>,
    g: &'b Geom,
}

impl PointCtx<'_, '_> {
    /// E(p)·m = lin(m) + ang(m) × p.
    fn e_apply(&self, m: &SpatialMotionVec) -> Vec3 {
        lin_part(m) + ang_part(m).cross(&self.g.p)
    }

    /// ∂c_a/∂q_l = σ_a × c_l + [l⪯a] E(p)(s_l × s_a); both coordinates on path.
    fn dcol(&self, a: usize, l: usize) -> Vec3 {
        let mut out = ang_part(&self.cx.s[a]).cross(&self.g.c[l]);
        if self.cx.dof_leq(l, a) {
            out += self.e_apply(&cross_motion(&self.cx.s[l], &self.cx.s[a]));
        }
        out
    }
}

/// The contact Jacobian with the drift γ = J̇_c q̇ and all first and second
/// derivatives the constrained-dynamics derivatives consume. Second
/// q-derivatives of J_c itself are exposed through [`d2jc_contract`]
/// (weighted pages), since consumers only ever contract the order-4 object
/// with a vector. Mixed tensors are laid out [row, du, dw] with the outer
/// derivative on axis 3.
///
/// [`d2jc_contract`]: ContactKinematics::d2jc_contract
pub struct ContactKinematics {
    pub jc: DMatrix<f64>,
    pub jdot_qd: DVector<f64>,
    /// [row, col, k] = ∂(J_c)_{row,col}/∂q_k.
    pub djc_dq: Tensor3,
    pub d_jdotqd_dq: DMatrix<f64>,
    pub d_jdotqd_dqd: DMatrix<f64>,
    pub d2_jdotqd_dq2: Tensor3,
    /// [row, b, l] = ∂²γ/∂q̇_b ∂q_l.
    pub d2_jdotqd_dqdq: Tensor3,
    pub d2_jdotqd_dqd2: Tensor3,
    kin: KinematicsCache,
    geoms: Vec<Geom>,
}

pub fn contact_jacobian(
    tree: &KinematicTree,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    spec: &ContactSpec,
) -> ContactKinematics {
    let nv = tree.nv();
    let n_c = spec.n_c();
    let state = RobotState { q: q.clone(), qd: qd.clone(), qdd: DVector::zeros(nv) };
    // Gravity-free, acceleration-free pass: a[i] is then the pure velocity
    // bias, which is what the drift γ measures.
    let kin = forward_pass_with_gravity(tree, &state, &Vec3::zeros());
    let cx = Ctx::new(tree, &kin);

    let mut geoms = Vec::with_capacity(spec.points.len());
    for pt in &spec.points {
        assert!(pt.body < tree.n_bodies(), "contact body {} out of range", pt.body);
        let mb = pt.body;
        let p = kin.x0[mb].transform_point(&pt.point);
        let on_path: Vec<bool> =
            (0..nv).map(|d| tree.leq(tree.dof_joint(d).0, mb)).collect();
        let c: Vec<Vec3> = (0..nv)
            .map(|d| {
                if on_path[d] {
                    lin_part(&cx.s[d]) + ang_part(&cx.s[d]).cross(&p)
                } else {
                    Vec3::zeros()
                }
            })
            .collect();
        let v = kin.v[mb];
        let pdot = lin_part(&v) + ang_part(&v).cross(&p);
        geoms.push(Geom { mb, p, pdot, c, on_path, path_joints: tree.ancestors(mb).to_vec() });
    }

    let mut jc = DMatrix::zeros(n_c, nv);
    let mut jdot_qd = DVector::zeros(n_c);
    let mut djc_dq = Tensor3::zeros(n_c, nv, nv);
    let mut d_jdotqd_dq = DMatrix::zeros(n_c, nv);
    let mut d_jdotqd_dqd = DMatrix::zeros(n_c, nv);
    let mut d2_jdotqd_dq2 = Tensor3::zeros(n_c, nv, nv);
    let mut d2_jdotqd_dqdq = Tensor3::zeros(n_c, nv, nv);
    let mut d2_jdotqd_dqd2 = Tensor3::zeros(n_c, nv, nv);

    for (ci, g) in geoms.iter().enumerate() {
        let row0 = 3 * ci;
        let pc = PointCtx { cx: &cx, g };
        let set3 = |m: &mut DMatrix<f64>, col: usize, v: &Vec3| {
            for r in 0..3 {
                m[(row0 + r, col)] = v[r];
            }
        };
        let sett = |t: &mut Tensor3, a: usize, b: usize, v: &Vec3| {
            for r in 0..3 {
                t[(row0 + r, a, b)] = v[r];
            }
        };

        let vmb = kin.v[g.mb];
        let omega = ang_part(&vmb);
        let abias = kin.a[g.mb];

        for d in 0..nv {
            if g.on_path[d] {
                set3(&mut jc, d, &g.c[d]);
            }
        }
        // γ = E(p)·a_bias + ω × ṗ.
        let gamma = pc.e_apply(&abias) + omega.cross(&g.pdot);
        for r in 0..3 {
            jdot_qd[row0 + r] = gamma[r];
        }

        let path: Vec<usize> = (0..nv).filter(|&d| g.on_path[d]).collect();
        for &a in &path {
            for &l in &path {
                let d = pc.dcol(a, l);
                sett(&mut djc_dq, a, l, &d);
            }
        }

        // First derivatives of γ.
        for &l in &path {
            let al = cx.da(g.mb, l);
            let vl = cx.dv(g.mb, l);
            let wl = ang_part(&vl);
            let dgam = lin_part(&al)
                + ang_part(&al).cross(&g.p)
                + ang_part(&abias).cross(&g.c[l])
                + wl.cross(&lin_part(&vmb))
                + omega.cross(&lin_part(&vl))
                + wl.cross(&omega.cross(&g.p))
                + omega.cross(&wl.cross(&g.p))
                + omega.cross(&omega.cross(&g.c[l]));
            set3(&mut d_jdotqd_dq, l, &dgam);

            // ∂γ/∂q̇_l = E(p)(ψ̇_l + φ̇_l − v_mb × s_l) + σ_l × ṗ + ω × c_l.
            let adot = cx.psid[l] + cx.phid[l] - cross_motion(&vmb, &cx.s[l]);
            let dgam_qd = pc.e_apply(&adot)
                + ang_part(&cx.s[l]).cross(&g.pdot)
                + omega.cross(&g.c[l]);
            set3(&mut d_jdotqd_dqd, l, &dgam_qd);
        }

        // Second derivatives of γ: product rule over the first-derivative
        // terms, with direction m (outer, axis 3) applied to direction l.
        for &l in &path {
            let al = cx.da(g.mb, l);
            let vl = cx.dv(g.mb, l);
            let wl = ang_part(&vl);
            let jl = tree.dof_joint(l).0;
            for &m in &path {
                let am = cx.da(g.mb, m);
                let vm = cx.dv(g.mb, m);
                let wm = ang_part(&vm);
                let cm_col = g.c[m];
                let pll = pc.dcol(l, m);

                // X_m of A' = ψ̈_l − v×ψ̇_l − a×s_l.
                let all = cx.dpsidd(l, m)
                    - cross_motion(&vm, &cx.psid[l])
                    - cross_motion(&vmb, &cx.dpsid(l, m))
                    - cross_motion(&am, &cx.s[l])
                    - cross_motion(&abias, &cx.ds(l, m));
                // X_m of V' = (v_{λ(l)} − v)×s_l.
                let dvpl = match tree.parent(jl) {
                    Some(pb) => cx.dv(pb, m),
                    None => SpatialMotionVec::zeros(),
                };
                let vll = cross_motion(&(dvpl - vm), &cx.s[l])
                    + cross_motion(&(kin.parent_v(tree, jl) - vmb), &cx.ds(l, m));
                let wll = ang_part(&vll);

                let d2 = lin_part(&all)
                    + ang_part(&all).cross(&g.p)
                    + ang_part(&al).cross(&cm_col)
                    + ang_part(&am).cross(&g.c[l])
                    + ang_part(&abias).cross(&pll)
                    + wll.cross(&lin_part(&vmb))
                    + wl.cross(&lin_part(&vm))
                    + wm.cross(&lin_part(&vl))
                    + omega.cross(&lin_part(&vll))
                    + wll.cross(&omega.cross(&g.p))
                    + wl.cross(&wm.cross(&g.p))
                    + wl.cross(&omega.cross(&cm_col))
                    + wm.cross(&wl.cross(&g.p))
                    + omega.cross(&wll.cross(&g.p))
                    + omega.cross(&wl.cross(&cm_col))
                    + wm.cross(&omega.cross(&g.c[l]))
                    + omega.cross(&wm.cross(&g.c[l]))
                    + omega.cross(&omega.cross(&pll));
                sett(&mut d2_jdotqd_dq2, l, m, &d2);

                // X_m of ∂γ/∂q̇_l (l is the q̇ coordinate, m the q one).
                let adot = cx.psid[l] + cx.phid[l] - cross_motion(&vmb, &cx.s[l]);
                let dadot = cx.dpsid(l, m) + cx.dphid(l, m)
                    - cross_motion(&vm, &cx.s[l])
                    - cross_motion(&vmb, &cx.ds(l, m));
                let pdot_m =
                    lin_part(&vm) + wm.cross(&g.p) + omega.cross(&cm_col);
                let mixed = pc.e_apply(&dadot)
                    + ang_part(&adot).cross(&cm_col)
                    + ang_part(&cx.ds(l, m)).cross(&g.pdot)
                    + ang_part(&cx.s[l]).cross(&pdot_m)
                    + wm.cross(&g.c[l])
                    + omega.cross(&pc.dcol(l, m));
                sett(&mut d2_jdotqd_dqdq, l, m, &mixed);

                // ∂²γ/∂q̇_l ∂q̇_m: symmetric.
                let jm = tree.dof_joint(m).0;
                let coeff = if jm == jl {
                    0.0
                } else if tree.leq(jm, jl) {
                    1.0
                } else {
                    -1.0
                };
                let dadot2 = cross_motion(&cx.s[m], &cx.s[l]) * coeff;
                let qd2 = pc.e_apply(&dadot2)
                    + ang_part(&cx.s[l]).cross(&cm_col)
                    + ang_part(&cx.s[m]).cross(&g.c[l]);
                sett(&mut d2_jdotqd_dqd2, l, m, &qd2);
            }
        }
    }

    ContactKinematics {
        jc,
        jdot_qd,
        djc_dq,
        d_jdotqd_dq,
        d_jdotqd_dqd,
        d2_jdotqd_dq2,
        d2_jdotqd_dqdq,
        d2_jdotqd_dqd2,
        kin,
        geoms,
    }
}

impl ContactKinematics {
    pub fn n_c(&self) -> usize {
        self.jc.nrows()
    }

    /// Σ_a w_a ∂²(J_c)_{:,a}/∂q_l ∂q_m as a tensor [row, l, m] (m outer).
    /// This is the only form of ∂²J_c/∂q² the dynamics derivatives need
    /// (contracted against q̈ or q̇₊).
    pub fn d2jc_contract(&self, tree: &KinematicTree, w: &DVector<f64>) -> Tensor3 {
        let nv = tree.nv();
        let mut out = Tensor3::zeros(self.n_c(), nv, nv);
        let cx = Ctx::new(tree, &self.kin);
        for (ci, g) in self.geoms.iter().enumerate() {
            let row0 = 3 * ci;
            let pc = PointCtx { cx: &cx, g };
            // Path-suffix sums y[j] = Σ_{a: j ⪯ joint(a)} w_a s_a.
            let mut y = vec![SpatialMotionVec::zeros(); tree.n_bodies()];
            let mut acc = SpatialMotionVec::zeros();
            for &j in g.path_joints.iter().rev() {
                for d in tree.joint_dofs(j) {
                    acc += cx.s[d] * w[d];
                }
                y[j] = acc;
            }
            let w_total = match g.path_joints.first() {
                Some(&root) => y[root],
                None => SpatialMotionVec::zeros(),
            };
            let path: Vec<usize> = (0..nv).filter(|&d| g.on_path[d]).collect();
            for &l in &path {
                let jl = tree.dof_joint(l).0;
                let wpl = cross_motion(&cx.s[l], &y[jl]);
                for &m in &path {
                    let jm = tree.dof_joint(m).0;
                    let wpm = cross_motion(&cx.s[m], &y[jm]);
                    let deep = if tree.leq(jl, jm) { jm } else { jl };
                    let wpp = cross_motion(&cx.ds(l, m), &y[jl])
                        + cross_motion(&cx.s[l], &cross_motion(&cx.s[m], &y[deep]));
                    let d2 = pc.e_apply(&wpp)
                        + ang_part(&wpl).cross(&g.c[m])
                        + ang_part(&wpm).cross(&g.c[l])
                        + ang_part(&w_total).cross(&pc.dcol(l, m));
                    for r in 0..3 {
                        out[(row0 + r, l, m)] += d2[r];
                    }
                }
            }
        }
        out
    }

    /// Hessian pages of one Jacobian column: [row, l, m] = ∂²(J_c)_{:,a}/∂q_l∂q_m.
    pub fn d2jc_column(&self, tree: &KinematicTree, a: usize) -> Tensor3 {
        let mut w = DVector::zeros(tree.nv());
        w[a] = 1.0;
        self.d2jc_contract(tree, &w)
    }
}
