//! Finite-difference differentiation engine and comparison reporting: the
//! independent numerical authority every analytic derivative is checked
//! against. Central differences only; configuration-space derivatives use
//! the model's tangent retraction so quaternion joints difference cleanly.

use model::{perturb_q, KinematicTree, RobotState};
use nalgebra::{DMatrix, DVector};
use spatial::Tensor3;

/// Step sizes for first- and second-order probes.
#[derive(Clone, Copy, Debug)]
pub struct FdConfig {
    pub h_fo: f64,
    pub h_so: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        // h_fo near cbrt(eps), h_so near eps^(1/4): the usual central
        // difference truncation/roundoff balance for first and second order.
        FdConfig { h_fo: 4e-6, h_so: 1e-4 }
    }
}

/// Which state variable a robot-space derivative runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Q,
    Qd,
    Qdd,
}

fn check_finite(v: &DVector<f64>) -> &DVector<f64> {
    assert!(
        v.iter().all(|x| x.is_finite()),
        "non-finite function value in finite-difference probe"
    );
    v
}

/// Central-difference Jacobian of a plain vector function on ℝⁿ.
/// Column i is (f(x + h·eᵢ) − f(x − h·eᵢ)) / 2h.
pub fn fd_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    h: f64,
) -> DMatrix<f64> {
    assert!(h > 0.0, "step must be positive");
    let n = x.len();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut xp = x.clone();
        xp[i] += h;
        let mut xm = x.clone();
        xm[i] -= h;
        let fp = f(&xp);
        let fm = f(&xm);
        check_finite(&fp);
        check_finite(&fm);
        cols.push((fp - fm) / (2.0 * h));
    }
    let m = cols.first().map_or(0, DVector::len);
    DMatrix::from_fn(m, n, |r, c| cols[c][r])
}

/// Applies the tangent retraction for one coordinate of one state variable.
pub fn perturb_state(
    tree: &KinematicTree,
    state: &RobotState,
    var: Var,
    dof: usize,
    h: f64,
) -> RobotState {
    let mut out = state.clone();
    match var {
        Var::Q => out.q = perturb_q(tree, &state.q, dof, h),
        Var::Qd => out.qd[dof] += h,
        Var::Qdd => out.qdd[dof] += h,
    }
    out
}

/// Central-difference Jacobian of a robot-state function along the tangent
/// directions of one state variable. Column order follows the velocity
/// coordinate layout.
pub fn fd_jacobian_robot(
    tree: &KinematicTree,
    state: &RobotState,
    var: Var,
    h: f64,
    f: impl Fn(&RobotState) -> DVector<f64>,
) -> DMatrix<f64> {
    assert!(h > 0.0, "step must be positive");
    let n = tree.nv();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let fp = f(&perturb_state(tree, state, var, i, h));
        let fm = f(&perturb_state(tree, state, var, i, -h));
        check_finite(&fp);
        check_finite(&fm);
        cols.push((fp - fm) / (2.0 * h));
    }
    let m = cols.first().map_or(0, DVector::len);
    DMatrix::from_fn(m, n, |r, c| cols[c][r])
}

/// Differences a matrix-valued robot-state function once, stacking the
/// directional derivatives along axis 3. This is the preferred second-order
/// oracle: one difference of an analytic first-order result.
pub fn fd_tensor_of_matrix_robot(
    tree: &KinematicTree,
    state: &RobotState,
    var: Var,
    h: f64,
    f: impl Fn(&RobotState) -> DMatrix<f64>,
) -> Tensor3 {
    assert!(h > 0.0, "step must be positive");
    let n = tree.nv();
    let mut pages: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let fp = f(&perturb_state(tree, state, var, k, h));
        let fm = f(&perturb_state(tree, state, var, k, -h));
        assert!(
            fp.iter().chain(fm.iter()).all(|x| x.is_finite()),
            "non-finite function value in finite-difference probe"
        );
        pages.push((fp - fm) / (2.0 * h));
    }
    Tensor3::from_pages(&pages)
}

/// Raw nested central differences, no symmetrization. Entry [:, j, k] is the
/// ordered second derivative: inner difference along `inner` coordinate j
/// (step cfg.h_fo), outer difference along `outer` coordinate k (step
/// cfg.h_so). Axis 3 is the outer derivative.
pub fn fd_hessian_robot_raw(
    tree: &KinematicTree,
    state: &RobotState,
    inner: Var,
    outer: Var,
    cfg: &FdConfig,
    f: impl Fn(&RobotState) -> DVector<f64>,
) -> Tensor3 {
    let n = tree.nv();
    let inner_jac_col = |base: &RobotState, j: usize| -> DVector<f64> {
        let fp = f(&perturb_state(tree, base, inner, j, cfg.h_fo));
        let fm = f(&perturb_state(tree, base, inner, j, -cfg.h_fo));
        check_finite(&fp);
        check_finite(&fm);
        (fp - fm) / (2.0 * cfg.h_fo)
    };
    let mut out: Option<Tensor3> = None;
    for k in 0..n {
        let bp = perturb_state(tree, state, outer, k, cfg.h_so);
        let bm = perturb_state(tree, state, outer, k, -cfg.h_so);
        for j in 0..n {
            let col = (inner_jac_col(&bp, j) - inner_jac_col(&bm, j)) / (2.0 * cfg.h_so);
            let t = out.get_or_insert_with(|| Tensor3::zeros(col.len(), n, n));
            for r in 0..col.len() {
                t[(r, j, k)] = col[r];
            }
        }
    }
    out.expect("at least one coordinate")
}

/// Symmetrized second derivative: the average of the (j,k) and (k,j)
/// orderings. For a single variable this is ½(T + Tᵀ) over axes 2 and 3;
/// for mixed variables both orders are evaluated and averaged.
pub fn fd_hessian_robot(
    tree: &KinematicTree,
    state: &RobotState,
    inner: Var,
    outer: Var,
    cfg: &FdConfig,
    f: impl Fn(&RobotState) -> DVector<f64>,
) -> Tensor3 {
    if inner == outer {
        fd_hessian_robot_raw(tree, state, inner, outer, cfg, &f).symmetrize23()
    } else {
        let a = fd_hessian_robot_raw(tree, state, inner, outer, cfg, &f);
        let b = fd_hessian_robot_raw(tree, state, outer, inner, cfg, &f);
        let sum = &a + &b.rot23();
        &sum * 0.5
    }
}

/// Plain-ℝⁿ symmetrized Hessian of a vector function.
pub fn fd_hessian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    cfg: &FdConfig,
) -> Tensor3 {
    let n = x.len();
    let at = |k: usize, hk: f64, j: usize, hj: f64| {
        let mut y = x.clone();
        y[k] += hk;
        y[j] += hj;
        f(&y)
    };
    let mut out: Option<Tensor3> = None;
    for k in 0..n {
        for j in 0..n {
            let pp = at(k, cfg.h_so, j, cfg.h_fo);
            let pm = at(k, cfg.h_so, j, -cfg.h_fo);
            let mp = at(k, -cfg.h_so, j, cfg.h_fo);
            let mm = at(k, -cfg.h_so, j, -cfg.h_fo);
            check_finite(&pp);
            check_finite(&mm);
            let col = ((pp - pm) - (mp - mm)) / (4.0 * cfg.h_fo * cfg.h_so);
            let t = out.get_or_insert_with(|| Tensor3::zeros(col.len(), n, n));
            for r in 0..col.len() {
                t[(r, j, k)] = col[r];
            }
        }
    }
    out.expect("at least one coordinate").symmetrize23()
}

/// Element-wise comparison verdict. `argmax` is the index of the entry with
/// the largest tolerance-normalized violation.
#[derive(Clone, Debug)]
pub struct CompareReport {
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub argmax: (usize, usize, usize),
    pub pass: bool,
}

const REL_FLOOR: f64 = 1e-8;

fn compare_entries(
    pairs: impl Iterator<Item = ((usize, usize, usize), f64, f64)>,
    tol_rel: f64,
    tol_abs: f64,
) -> CompareReport {
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut argmax = (0, 0, 0);
    let mut worst_ratio = -1.0f64;
    let mut pass = true;
    for (idx, a, b) in pairs {
        let diff = (a - b).abs();
        let scale = a.abs().max(b.abs()).max(REL_FLOOR);
        let rel = diff / scale;
        max_abs = max_abs.max(diff);
        max_rel = max_rel.max(rel);
        let allow = tol_abs.max(tol_rel * scale);
        // Inclusive boundary: an error exactly at tolerance passes.
        let ratio = if diff == 0.0 {
            0.0
        } else if allow == 0.0 {
            f64::INFINITY
        } else {
            diff / allow
        };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            argmax = idx;
        }
        if ratio > 1.0 {
            pass = false;
        }
    }
    CompareReport { max_abs_err: max_abs, max_rel_err: max_rel, argmax, pass }
}

pub fn compare_tensors(a: &Tensor3, b: &Tensor3, tol_rel: f64, tol_abs: f64) -> CompareReport {
    assert_eq!(a.dims(), b.dims(), "compare: tensor shape mismatch");
    let (d1, d2, d3) = a.dims();
    let it = (0..d3).flat_map(move |k| {
        (0..d2).flat_map(move |j| (0..d1).map(move |i| ((i, j, k), a[(i, j, k)], b[(i, j, k)])))
    });
    compare_entries(it, tol_rel, tol_abs)
}

pub fn compare_matrices(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol_rel: f64,
    tol_abs: f64,
) -> CompareReport {
    assert_eq!(a.shape(), b.shape(), "compare: matrix shape mismatch");
    let it = (0..a.ncols()).flat_map(move |c| {
        (0..a.nrows()).map(move |r| ((r, c, 0), a[(r, c)], b[(r, c)]))
    });
    compare_entries(it, tol_rel, tol_abs)
}

pub fn compare_vectors(
    a: &DVector<f64>,
    b: &DVector<f64>,
    tol_rel: f64,
    tol_abs: f64,
) -> CompareReport {
    assert_eq!(a.len(), b.len(), "compare: vector length mismatch");
    let it = (0..a.len()).map(move |i| ((i, 0, 0), a[i], b[i]));
    compare_entries(it, tol_rel, tol_abs)
}
