//! Kinematic tree robot model: joint models and their motion subspaces,
//! a JSON model-file format, random model generation for tests, and the
//! joint-space state with its tangent-space retraction.

pub mod file;
pub mod joint;
pub mod random;
pub mod state;
pub mod tree;

pub use file::{parse_model, ModelFile};
pub use joint::{joint_kinematics, JointModel};
pub use random::{random_model, random_model_file, random_state};
pub use state::{advance_q, perturb_q, zero_q, RobotState};
pub use tree::{ContactPoint, KinematicTree, ModelError};
