//! Analytic first- and second-order partial derivatives of rigid-body
//! inverse dynamics over kinematic trees, the mass-matrix configuration
//! gradient, and forward-dynamics derivatives recovered from them through
//! mass-matrix solves. Configuration derivatives run along the joint
//! tangent retraction, so quaternion joints need no chart bookkeeping.

mod dof;
pub mod first_order;
pub mod forward;
pub mod second_order;

pub use first_order::{
    fext_cumulative_fo, id_fo, id_fo_constrained, id_fo_with_visits, FirstOrderDerivs,
};
pub use forward::{fd_fo, fd_so, forward_dynamics, FdError, FdFirstOrder, FdSecondOrder};
pub use second_order::{
    dMdq_times, id_so, id_so_constrained, id_so_with_visits, idsoza_c, SecondOrderDerivs,
};
