//! Forward dynamics and its first and second derivatives, obtained from the
//! inverse-dynamics partials through the mass-matrix relations: once
//! ID(q, qd, FD(q, qd, tau)) = tau is differentiated, every forward
//! derivative is a mass-matrix solve against inverse-dynamics data.

use dynamics::{crba, rnea};
use model::{KinematicTree, RobotState};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use spatial::{tmprod, SpatialForceVec, Tensor3};
use thiserror::Error;

use crate::first_order::id_fo;
use crate::second_order::id_so;

#[derive(Debug, Error)]
pub enum FdError {
    #[error("mass matrix is singular or ill-conditioned (min eigenvalue {min_eig:.3e}, condition {cond:.3e})")]
    SingularMass { min_eig: f64, cond: f64 },
}

/// First partials of the forward dynamics qdd = FD(q, qd, tau).
#[derive(Clone, Debug)]
pub struct FdFirstOrder {
    pub dqdd_dq: DMatrix<f64>,
    pub dqdd_dqd: DMatrix<f64>,
    /// Equals the mass-matrix inverse.
    pub dqdd_dtau: DMatrix<f64>,
}

impl FdFirstOrder {
    /// The three blocks side by side as one nv x 3nv matrix, ordered
    /// [d/dq | d/dqd | d/dtau].
    pub fn assembled(&self) -> DMatrix<f64> {
        let nv = self.dqdd_dq.nrows();
        let mut out = DMatrix::zeros(nv, 3 * nv);
        out.view_mut((0, 0), (nv, nv)).copy_from(&self.dqdd_dq);
        out.view_mut((0, nv), (nv, nv)).copy_from(&self.dqdd_dqd);
        out.view_mut((0, 2 * nv), (nv, nv)).copy_from(&self.dqdd_dtau);
        out
    }
}

/// Second partials of the forward dynamics. Axis 3 is always the outer
/// q-derivative; the velocity Hessian is the only all-velocity block.
/// The (tau, tau) block is identically zero (the mass matrix depends on q
/// alone) and is not stored; (q, qd) and (q, tau) orderings are the rot23
/// transposes of the stored mixed blocks.
#[derive(Clone, Debug)]
pub struct FdSecondOrder {
    pub d2qdd_dq2: Tensor3,
    pub d2qdd_dqd2: Tensor3,
    /// Derivative of dqdd/dqd along q.
    pub d2qdd_cross: Tensor3,
    /// Derivative of dqdd/dtau along q.
    pub d2qdd_tauq: Tensor3,
}

fn factor_spd(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>, FdError> {
    let eig = m.clone().symmetric_eigenvalues();
    let min_eig = eig.min();
    let max_eig = eig.max();
    let cond = if min_eig > 0.0 { max_eig / min_eig } else { f64::INFINITY };
    if min_eig <= 1e-10 || cond > 1e12 {
        return Err(FdError::SingularMass { min_eig, cond });
    }
    Cholesky::new(m.clone()).ok_or(FdError::SingularMass { min_eig, cond })
}

/// Forward dynamics by bias elimination: qdd = M^{-1}(tau - ID(q, qd, 0)),
/// with the optional external wrenches entering through the bias torque.
pub fn forward_dynamics(
    tree: &KinematicTree,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    tau: &DVector<f64>,
    fext: Option<&[SpatialForceVec]>,
) -> Result<DVector<f64>, FdError> {
    let state = RobotState { q: q.clone(), qd: qd.clone(), qdd: DVector::zeros(tree.nv()) };
    let (bias, _) = rnea(tree, &state, fext);
    let chol = factor_spd(&crba(tree, q))?;
    Ok(chol.solve(&(tau - bias)))
}

/// First forward-dynamics derivatives: -M^{-1} applied to the analytic
/// inverse-dynamics partials evaluated at qdd = FD(q, qd, tau), plus the
/// M^{-1} torque block.
pub fn fd_fo(
    tree: &KinematicTree,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    tau: &DVector<f64>,
) -> Result<FdFirstOrder, FdError> {
    let nv = tree.nv();
    let chol = factor_spd(&crba(tree, q))?;
    let state = RobotState { q: q.clone(), qd: qd.clone(), qdd: DVector::zeros(nv) };
    let (bias, _) = rnea(tree, &state, None);
    let qdd = chol.solve(&(tau - bias));
    let fo = id_fo(tree, &RobotState { q: q.clone(), qd: qd.clone(), qdd });
    Ok(FdFirstOrder {
        dqdd_dq: -chol.solve(&fo.dtau_dq),
        dqdd_dqd: -chol.solve(&fo.dtau_dqd),
        dqdd_dtau: chol.solve(&DMatrix::identity(nv, nv)),
    })
}

/// Applies M^{-1} down axis 1 of a tensor: the axis-1-fastest layout makes
/// each tensor a 6-free-column matrix unfold, so one factorization solves
/// all nv^2 columns at once.
fn solve_axis1(chol: &Cholesky<f64, Dyn>, t: &Tensor3, scale: f64) -> Tensor3 {
    let (d1, d2, d3) = t.dims();
    let flat = DMatrix::from_column_slice(d1, d2 * d3, t.data());
    let sol = chol.solve(&flat);
    Tensor3::from_fn(d1, d2, d3, |x, y, z| scale * sol[(x, y + d2 * z)])
}

/// Second forward-dynamics derivatives from the differentiated identity
/// d2ID + dM dFD (both orders) + M d2FD = 0, solved for d2FD. All
/// inverse-dynamics pieces are evaluated at qdd = FD(q, qd, tau).
pub fn fd_so(
    tree: &KinematicTree,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    tau: &DVector<f64>,
) -> Result<FdSecondOrder, FdError> {
    let nv = tree.nv();
    let chol = factor_spd(&crba(tree, q))?;
    let state = RobotState { q: q.clone(), qd: qd.clone(), qdd: DVector::zeros(nv) };
    let (bias, _) = rnea(tree, &state, None);
    let qdd = chol.solve(&(tau - bias));
    let at = RobotState { q: q.clone(), qd: qd.clone(), qdd };
    let fo = id_fo(tree, &at);
    let so = id_so(tree, &at);
    let dfd_dq = -chol.solve(&fo.dtau_dq);
    let dfd_dqd = -chol.solve(&fo.dtau_dqd);
    let minv = chol.solve(&DMatrix::identity(nv, nv));

    let slope_q = tmprod(&so.dM_dq, &dfd_dq);
    let t_qq = &(&so.d2tau_dq2 + &slope_q) + &slope_q.rot23();
    let t_vq = &so.d2tau_cross + &tmprod(&so.dM_dq, &dfd_dqd);
    let t_tq = tmprod(&so.dM_dq, &minv);
    Ok(FdSecondOrder {
        d2qdd_dq2: solve_axis1(&chol, &t_qq, -1.0),
        d2qdd_dqd2: solve_axis1(&chol, &so.d2tau_dqd2, -1.0),
        d2qdd_cross: solve_axis1(&chol, &t_vq, -1.0),
        d2qdd_tauq: solve_axis1(&chol, &t_tq, -1.0),
    })
}
