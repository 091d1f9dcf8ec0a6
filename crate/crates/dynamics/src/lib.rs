//! Recursive rigid-body dynamics on kinematic trees: the ground-frame
//! forward kinematic sweep, RNEA inverse dynamics with composite subtree
//! quantities, the CRBA mass matrix, contact-point Jacobians with their
//! configuration derivatives, and a finite-difference identity suite for
//! the directional-derivative laws the analytic derivatives rely on.

pub mod contact_jac;
pub mod kinematics;
pub mod rnea;
pub mod suite;

pub use contact_jac::{contact_jacobian, ContactKinematics, ContactSpec};
pub use kinematics::{forward_pass, forward_pass_with_gravity, KinematicsCache};
pub use rnea::{crba, rnea, subtree_sums, DynamicsCache};
